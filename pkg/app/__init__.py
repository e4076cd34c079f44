"""Constrained stable matching solver."""
