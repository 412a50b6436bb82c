"""Sparse suffix trees and arrays in O(b) working space.

A Monte Carlo build from Karp-Rabin fingerprints, plus a deterministic
verifier that certifies its output for a Las Vegas variant.
"""
from .builder import BuildConfig, SparseSuffixTree, build_sst
from .text import PositionSet, Text, brute_sparse_sort, naive_lce
from .verifier import Bottom, Equation, Verdict, build_las_vegas, verify_sst, verify_system

__all__ = [
    "BuildConfig", "SparseSuffixTree", "build_sst", "PositionSet", "Text",
    "brute_sparse_sort", "naive_lce", "Bottom", "Equation", "Verdict",
    "build_las_vegas", "verify_sst", "verify_system",
]
