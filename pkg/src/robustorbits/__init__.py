"""Exact algorithms for robust orbit problems of torus actions."""
