"""Property-based test generation and runtime guardrails for cyber-physical programs."""

__version__ = "0.1.0"
