"""deanon-bench: anonymize social data under four cases, attack each, measure."""

__version__ = "0.1.0"
