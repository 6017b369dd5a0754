"""Evaluation harness: property relevance, PBT executability and input-space
partition effectiveness.

Mapping tables are CSV files with one row per property and the columns
``ID, Program ID, Program, Ground-truth Property, Extracted Property,
Group, Note``.  Rows whose ground-truth cell is a marker (``Neglected.``,
``Correctly not included.``) have no ground-truth property; rows whose
extracted cell reads ``Not extracted.`` have no extracted property.
"""

from __future__ import annotations

import csv
import enum
import json
import math
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import whatthepatch
from whatthepatch.exceptions import WhatThePatchException

from .analyzer import run_pbt
from .errors import ClassificationError, ConfigurationError, MappingConsistencyError, SchemeCoverageError
from .records import GeneratedPBT, OutcomeClass, PBTReport, TestOutcome

GROUPS = ("exact_match", "equivalent_match", "extracted_only", "groundtruth_only")
NO_GROUNDTRUTH_MARKERS = ("Neglected.", "Correctly not included.")
NOT_EXTRACTED_MARKER = "Not extracted."
SAME_AS_GROUNDTRUTH = "Same as ground-truth."
MAPPING_COLUMNS = ("ID", "Program ID", "Program", "Ground-truth Property", "Extracted Property", "Group", "Note")

MED_PATCH_BUDGET = 5
HIGH_RATIO = 0.8
MED_RATIO = 0.4


class Level(str, enum.Enum):
    HIGH = "HIGH"
    MED = "MED"
    LOW = "LOW"


# -- relevance -----------------------------------------------------------------

@dataclass(frozen=True)
class PropertyRecord:
    property_id: str
    program_id: str
    text: str
    group: str
    program: str = ""
    ground_truth: str = ""
    extracted: str = ""
    note: str = ""

    @property
    def in_groundtruth(self) -> bool:
        return bool(self.ground_truth) and self.ground_truth not in NO_GROUNDTRUTH_MARKERS

    @property
    def in_extracted(self) -> bool:
        return bool(self.extracted) and self.extracted != NOT_EXTRACTED_MARKER


@dataclass(frozen=True)
class MappingTable:
    records: tuple

    def count(self, group: str) -> int:
        return sum(1 for r in self.records if r.group == group)

    @property
    def groundtruth_size(self) -> int:
        return sum(1 for r in self.records if r.in_groundtruth)

    @property
    def extracted_size(self) -> int:
        return sum(1 for r in self.records if r.in_extracted)

    def validate(self) -> "MappingTable":
        ids = Counter(r.property_id for r in self.records)
        dupes = sorted(k for k, n in ids.items() if n > 1)
        if dupes:
            raise MappingConsistencyError(f"duplicate property ids: {', '.join(dupes)}")
        for r in self.records:
            if r.group not in GROUPS:
                raise MappingConsistencyError(f"{r.property_id}: unknown group {r.group!r}")
            both = r.group in ("exact_match", "equivalent_match")
            if both and not (r.in_groundtruth and r.in_extracted):
                raise MappingConsistencyError(f"{r.property_id}: a {r.group} row needs both a ground-truth "
                                              "and an extracted property")
            if r.group == "extracted_only" and (r.in_groundtruth or not r.in_extracted):
                raise MappingConsistencyError(f"{r.property_id}: an extracted_only row must have only an "
                                              "extracted property")
            if r.group == "groundtruth_only" and (r.in_extracted or not r.in_groundtruth):
                raise MappingConsistencyError(f"{r.property_id}: a groundtruth_only row must have only a "
                                              "ground-truth property")
        exact, equiv = self.count("exact_match"), self.count("equivalent_match")
        gt_rule = exact + equiv + self.count("groundtruth_only")
        ex_rule = exact + equiv + self.count("extracted_only")
        if self.groundtruth_size != gt_rule:
            raise MappingConsistencyError(
                f"|groundtruth| = exact + equivalent + groundtruth_only violated: {self.groundtruth_size} != {gt_rule}")
        if self.extracted_size != ex_rule:
            raise MappingConsistencyError(
                f"|extracted| = exact + equivalent + extracted_only violated: {self.extracted_size} != {ex_rule}")
        return self


def load_mapping(path) -> MappingTable:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = [c for c in MAPPING_COLUMNS if c not in (reader.fieldnames or [])]
            if missing:
                raise MappingConsistencyError(f"{path.name}: missing columns {', '.join(missing)}")
            records = []
            for row in reader:
                gt, ex = row["Ground-truth Property"].strip(), row["Extracted Property"].strip()
                if ex == SAME_AS_GROUNDTRUTH:
                    ex = gt
                text = ex if ex and ex != NOT_EXTRACTED_MARKER else gt
                records.append(PropertyRecord(row["ID"].strip(), row["Program ID"].strip(), text,
                                              row["Group"].strip(), row["Program"].strip(), gt, ex,
                                              (row.get("Note") or "").strip()))
    except OSError as exc:
        raise ConfigurationError(f"cannot read mapping table {path}: {exc.strerror or exc}") from exc
    return MappingTable(tuple(records)).validate()


@dataclass(frozen=True)
class Ratio:
    numerator: int
    denominator: int
    undefined_reason: str = ""

    @property
    def value(self) -> Optional[float]:
        return None if self.denominator == 0 else self.numerator / self.denominator

    def __str__(self):
        if self.value is None:
            return f"undefined ({self.undefined_reason})"
        return f"{self.value:.4f} ({self.numerator}/{self.denominator})"


@dataclass(frozen=True)
class RelevanceReport:
    precision: Ratio
    recall: Ratio
    counts: dict

    def to_dict(self) -> dict:
        return {"precision": self.precision.value, "recall": self.recall.value,
                "precision_fraction": [self.precision.numerator, self.precision.denominator],
                "recall_fraction": [self.recall.numerator, self.recall.denominator],
                "counts": self.counts}


def compute_relevance(mapping: MappingTable) -> RelevanceReport:
    mapping.validate()
    matched = mapping.count("exact_match") + mapping.count("equivalent_match")
    counts = {g: mapping.count(g) for g in GROUPS}
    counts.update(groundtruth=mapping.groundtruth_size, extracted=mapping.extracted_size)
    return RelevanceReport(
        Ratio(matched, mapping.extracted_size, "no extraction"),
        Ratio(matched, mapping.groundtruth_size, "no ground truth"),
        counts,
    )


def floor_percent(numerator: int, denominator: int) -> int:
    """Whole-percent figure truncated toward zero (18/21 -> 85)."""
    return (100 * numerator) // denominator if denominator else 0


# -- executability ---------------------------------------------------------------

def touched_lines(diff) -> int:
    """Sum over hunks of max(added, removed) lines."""
    total = 0
    for patch in diff:
        per_hunk: dict = {}
        for change in patch.changes or ():
            added, removed = per_hunk.get(change.hunk, (0, 0))
            if change.old is None and change.new is not None:
                added += 1
            elif change.new is None and change.old is not None:
                removed += 1
            per_hunk[change.hunk] = (added, removed)
        total += sum(max(a, r) for a, r in per_hunk.values())
    return total


def parse_patch(text: str) -> list:
    diffs = [d for d in whatthepatch.parse_patch(text) if d.changes]
    if not diffs:
        raise ClassificationError("patch contains no hunks")
    return diffs


def apply_patch(source: str, patch_text: str) -> tuple:
    """Return ``(patched source, touched line count)``."""
    diffs = parse_patch(patch_text)
    # whatthepatch folds back-to-back plain unified diffs into one, so count headers too
    headers = len(re.findall(r"^--- .*\n\+\+\+ ", patch_text, flags=re.MULTILINE))
    if len(diffs) != 1 or headers > 1:
        raise ClassificationError("a PBT patch must touch exactly one file")
    try:
        lines = whatthepatch.apply_diff(diffs[0], source.splitlines())
    except WhatThePatchException as exc:
        raise ClassificationError(f"patch does not apply: {exc}") from exc
    return "\n".join(lines) + "\n", touched_lines(diffs)


@dataclass(frozen=True)
class ExecutabilityResult:
    level: Level
    unmodified: str  # outcome class of the untouched PBT
    patched: Optional[str] = None
    touched: Optional[int] = None
    reason: str = ""


def classify_executability(pbt: GeneratedPBT, patch: Optional[str] = None, *, subject_id: Optional[str] = None,
                           runner: Callable[..., PBTReport] = run_pbt, timeout: float = 60.0,
                           budget: int = MED_PATCH_BUDGET) -> ExecutabilityResult:
    """HIGH: passes unmodified.  MED: passes after a patch touching at most
    ``budget`` lines.  LOW: anything else."""
    subject_id = subject_id or (pbt.final_report.subject_id if pbt.final_report else None)
    report = pbt.final_report
    if report is None:
        report = runner(pbt.source, subject_id, timeout, pbt_id=pbt.pbt_id)
    if report.outcome.passed:
        return ExecutabilityResult(Level.HIGH, report.outcome.cls.value, reason="passes unmodified")
    if patch is None:
        return ExecutabilityResult(Level.LOW, report.outcome.cls.value, reason="fails and no patch is shipped")
    patched_source, touched = apply_patch(pbt.source, patch)
    if touched > budget:
        return ExecutabilityResult(Level.LOW, report.outcome.cls.value, touched=touched,
                                   reason=f"patch touches {touched} lines (budget {budget})")
    patched = runner(patched_source, subject_id, timeout, pbt_id=pbt.pbt_id, attempt=1)
    if patched.outcome.passed:
        return ExecutabilityResult(Level.MED, report.outcome.cls.value, patched.outcome.cls.value, touched,
                                   f"passes after a {touched}-line patch")
    return ExecutabilityResult(Level.LOW, report.outcome.cls.value, patched.outcome.cls.value, touched,
                               "still fails after the patch")


# -- partition effectiveness -----------------------------------------------------

@dataclass(frozen=True)
class Cell:
    name: str
    values: Optional[tuple] = None  # category cell
    lo: Optional[float] = None
    hi: Optional[float] = None
    closed: tuple = (True, False)

    @property
    def is_interval(self) -> bool:
        return self.values is None

    def contains(self, value) -> bool:
        if self.values is not None:
            return any(value == v and isinstance(value, bool) == isinstance(v, bool) or value is v
                       for v in self.values)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or math.isnan(value):
            return False
        if self.lo is not None and not (self.lo <= value if self.closed[0] else self.lo < value):
            return False
        if self.hi is not None and not (value <= self.hi if self.closed[1] else value < self.hi):
            return False
        return True


@dataclass(frozen=True)
class Dimension:
    parameter: str
    cells: tuple

    def locate(self, value) -> Cell:
        for cell in self.cells:
            if cell.contains(value):
                return cell
        raise SchemeCoverageError(f"{self.parameter}={value!r} falls outside every cell")


@dataclass(frozen=True)
class PartitionScheme:
    program_id: str
    dimensions: tuple

    @property
    def cells_total(self) -> int:
        return sum(len(d.cells) for d in self.dimensions)

    def validate(self) -> "PartitionScheme":
        for dim in self.dimensions:
            if not dim.cells:
                raise ConfigurationError(f"{dim.parameter}: no cells")
            kinds = {c.is_interval for c in dim.cells}
            if len(kinds) > 1:
                raise ConfigurationError(f"{dim.parameter}: cannot mix interval and category cells")
            if kinds == {False}:
                seen = []
                for cell in dim.cells:
                    for v in cell.values:
                        if any(v == s and isinstance(v, bool) == isinstance(s, bool) or v is s for s in seen):
                            raise ConfigurationError(f"{dim.parameter}: value {v!r} is in two cells")
                        seen.append(v)
            else:
                cells = sorted(dim.cells, key=lambda c: -math.inf if c.lo is None else c.lo)
                for a, b in zip(cells, cells[1:]):
                    if a.hi is None or b.lo is None or a.hi != b.lo or a.closed[1] == b.closed[0]:
                        raise ConfigurationError(
                            f"{dim.parameter}: cells {a.name} and {b.name} overlap or leave a gap")
        return self


def scheme_from_dict(data: dict) -> PartitionScheme:
    dims = []
    for dim in data.get("dimensions", []):
        cells = []
        for c in dim["cells"]:
            if "values" in c:
                cells.append(Cell(c["name"], tuple(c["values"])))
            else:
                lo, hi = c["interval"]
                cells.append(Cell(c["name"], None, lo, hi, tuple(c.get("closed", (True, False)))))
        dims.append(Dimension(dim["parameter"], tuple(cells)))
    return PartitionScheme(data.get("program_id", ""), tuple(dims)).validate()


def load_scheme(path) -> PartitionScheme:
    try:
        return scheme_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
    except OSError as exc:
        raise ConfigurationError(f"cannot read partition scheme {path}: {exc.strerror or exc}") from exc
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigurationError(f"{path}: malformed partition scheme ({exc})") from exc


def effectiveness_level(cells_hit: int, cells_total: int) -> Level:
    ratio = cells_hit / cells_total if cells_total else 0.0
    if ratio >= HIGH_RATIO:
        return Level.HIGH
    if ratio >= MED_RATIO:
        return Level.MED
    return Level.LOW


@dataclass(frozen=True)
class EffectivenessResult:
    cells_hit: int
    cells_total: int
    level: Level
    hit: tuple = ()  # ((parameter, cell name), ...)
    samples: int = 0


def bucket_inputs(scheme: PartitionScheme, inputs: Iterable[dict]) -> EffectivenessResult:
    hit = set()
    count = 0
    for vector in inputs:
        count += 1
        for dim in scheme.dimensions:
            if dim.parameter in vector:
                hit.add((dim.parameter, dim.locate(vector[dim.parameter]).name))
    cells_hit = len(hit)
    return EffectivenessResult(cells_hit, scheme.cells_total, effectiveness_level(cells_hit, scheme.cells_total),
                               tuple(sorted(hit)), count)


def measure_effectiveness_runs(pbt: GeneratedPBT, scheme: PartitionScheme, samples: int, seeds: Sequence[int],
                               subject_id: Optional[str] = None, timeout: float = 600.0,
                               runner: Callable[..., PBTReport] = run_pbt) -> list:
    """One :class:`EffectivenessResult` per seed, all runs in one child process."""
    subject_id = subject_id or pbt.pbt_id.split(".")[0]
    report = runner(pbt.source, subject_id, timeout, pbt_id=pbt.pbt_id, record_inputs=True,
                    max_examples=samples, seeds=list(seeds))
    if report.outcome.cls in (OutcomeClass.SYNTAX_ERROR, OutcomeClass.COLLECTION_ERROR, OutcomeClass.TIMEOUT,
                              OutcomeClass.NO_TEST_PRODUCED):
        raise ClassificationError(f"cannot instrument {pbt.pbt_id}: {report.outcome.cls.value}: "
                                  f"{report.outcome.message}")
    by_run: dict = {i: [] for i in range(len(seeds))}
    for row in report.inputs:
        by_run.setdefault(row["run"], []).append(row["inputs"])
    return [bucket_inputs(scheme, by_run[i]) for i in range(len(seeds))]


def measure_effectiveness(pbt: GeneratedPBT, scheme: PartitionScheme, samples: int, seed: int = 0,
                          **kwargs) -> EffectivenessResult:
    return measure_effectiveness_runs(pbt, scheme, samples, [seed], **kwargs)[0]


# -- table-level evaluation ----------------------------------------------------------

@dataclass(frozen=True)
class QualityRow:
    property_id: str
    program: str
    subject_id: str
    expected_executability: str
    challenge: str
    effectiveness: str
    pbt_path: str = ""
    patch_path: str = ""
    recorded_outcome: str = ""  # for subjects without shipped code


def load_quality_table(path) -> list:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = []
        for row in csv.DictReader(fh):
            rows.append(QualityRow(row["Property_ID"], row["Program"], row["Subject"], row["Executability"],
                                   row["Main Executability Challenge"], row["Effectiveness"], row.get("PBT", ""),
                                   row.get("Patch", ""), row.get("Recorded Outcome", "")))
    return rows


@dataclass
class EvalReport:
    precision: Optional[float] = None
    recall: Optional[float] = None
    executability: dict = field(default_factory=dict)  # pbt id -> level
    effectiveness: dict = field(default_factory=dict)  # pbt id -> (hit, total, level)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "executability": {k: v.value for k, v in self.executability.items()},
            "effectiveness": {k: [h, t, lvl.value] for k, (h, t, lvl) in self.effectiveness.items()},
            "details": self.details,
        }


def evaluate_executability(rows: Sequence[QualityRow], base_dir, runner: Callable[..., PBTReport] = run_pbt,
                           timeout: float = 60.0, workers: int = 4) -> dict:
    """Classify every row; returns ``{property id: ExecutabilityResult}``."""
    base = Path(base_dir)

    def one(row: QualityRow) -> ExecutabilityResult:
        if row.recorded_outcome:
            outcome = OutcomeClass(row.recorded_outcome)
            pbt = GeneratedPBT(row.property_id, row.property_id, "", row.property_id,
                               final_report=PBTReport(row.property_id, TestOutcome(outcome), row.subject_id))
            return classify_executability(pbt, None, subject_id=row.subject_id, runner=runner, timeout=timeout)
        source = (base / row.pbt_path).read_text(encoding="utf-8")
        patch = (base / row.patch_path).read_text(encoding="utf-8") if row.patch_path else None
        pbt = GeneratedPBT(f"{row.subject_id}.{row.property_id}", row.property_id, source, row.property_id)
        return classify_executability(pbt, patch, subject_id=row.subject_id, runner=runner, timeout=timeout)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(one, rows))
    return {row.property_id: result for row, result in zip(rows, results)}


def level_counts(levels: Iterable) -> dict:
    counts = Counter(Level(lv).value for lv in levels)
    return {lv.value: counts.get(lv.value, 0) for lv in Level}


def summarize_effectiveness(rows: Sequence[QualityRow]) -> dict:
    counts = level_counts(r.effectiveness for r in rows)
    total = len(rows)
    return {"counts": counts, "total": total, "high_percent": floor_percent(counts["HIGH"], total)}
