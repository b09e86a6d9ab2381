"""Query-only de-anonymization attack: revealing posts, candidate search, feature matching."""
