"""Tilting-sheaf combinatorics on weighted curves."""
