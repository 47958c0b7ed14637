"""Exact Rumin complexes on Heisenberg groups and Pansu pullback checks."""
