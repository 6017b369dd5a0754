"""Regenerate replay conversations and the fixture checksum manifest.

Run after editing a subject bundle, a prompt template, an authored
response or any other fixture file:

    python tools/rebuild_fixtures.py
"""

import argparse

from pbtguard.fixtures import MANIFEST_PATH, rebuild_conversations, verify_fixtures, write_manifest


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--manifest-only", action="store_true", help="skip conversation regeneration")
    args = parser.parse_args(argv)
    if not args.manifest_only:
        for path in rebuild_conversations():
            print(f"conversation {path.name}")
    manifest = write_manifest()
    bad = [row for row in verify_fixtures(manifest) if row[1] != "ok"]
    print(f"{len(manifest.entries)} entries written to {MANIFEST_PATH}")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
