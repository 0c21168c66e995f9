"""Exact invariants of finitely generated virtually abelian groups."""

from .exactlinear import IntMatrix, RatVecMod1, SNFDecomposition, act_mod1, smith_normal_form, solve_diophantine

__all__ = [
    "IntMatrix",
    "RatVecMod1",
    "SNFDecomposition",
    "act_mod1",
    "smith_normal_form",
    "solve_diophantine",
]
