"""Data types, tokenization and file formats."""
