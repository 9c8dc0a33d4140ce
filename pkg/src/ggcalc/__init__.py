"""Exact symbolic calculus and numerical oracles for quantizations on
graded nilpotent Lie groups."""

__version__ = "0.1.0"
