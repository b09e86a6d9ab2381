"""Structural and textual anonymizers."""
