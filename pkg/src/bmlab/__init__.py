"""Bilinear multiplier laboratory.

Staircase paraproduct symbols over convex curves, interval combinatorics for
their disjoint splittings, a discrete bilinear multiplier engine, Whitney
tile geometry over polygonal epigraphs, and a deterministic CLI for
reproducible desk-scale experiments.
"""

__version__ = "0.1.0"

from . import bumps, config, curves, engine, intervals, reporting, symbols, whitney  # noqa: F401
