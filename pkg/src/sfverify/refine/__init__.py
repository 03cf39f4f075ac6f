"""Derivation, simplification, matching, and co-simulation of step programs.

Submodules are imported explicitly (``from sfverify.refine import pipeline``);
this package intentionally re-exports nothing to keep import edges one-way.
"""
