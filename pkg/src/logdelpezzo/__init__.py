"""Exact beta-hat invariants of divisors over two-dimensional log del Pezzo pairs."""

from .families import (blowup, curve_divisor, f1_einf, hirzebruch_pair, make_pair, p1xp1_diag,
                       p2_chain, p2_conic, p2_lines, quadric_chain)
from .kstability import beta, classify_pair
from .volume import volume_profile

__version__ = "0.1.0"

__all__ = [
    "beta", "blowup", "classify_pair", "curve_divisor", "f1_einf", "hirzebruch_pair",
    "make_pair", "p1xp1_diag", "p2_chain", "p2_conic", "p2_lines", "quadric_chain",
    "volume_profile",
]
