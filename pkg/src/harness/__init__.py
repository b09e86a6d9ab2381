"""Synthetic data, releases, the four-case matrix and its metrics."""
