"""Perfect K_t^k-factors in t-partite k-graphs: constructions, exact and
fractional solvers, absorption and near-perfect matchings."""

from .core import GeneralHypergraph, PartiteHypergraph, TGraph, min_codegree
from .exact import Matching, find_perfect_factor, verify_matching
from .fractional import solve_fractional
from .pipeline import PipelineConfig, PipelineFailure, perfect_factor

__version__ = "0.1.0"

__all__ = ["GeneralHypergraph", "PartiteHypergraph", "TGraph", "min_codegree", "Matching",
           "find_perfect_factor", "verify_matching", "solve_fractional", "PipelineConfig",
           "PipelineFailure", "perfect_factor"]
