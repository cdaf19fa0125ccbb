"""Simultaneous rational approximation to the powers of a real number."""

from .contfrac import best_approximations, check_prop1, convergents, decompose
from .construct import bugeaud_number, digit_membership, meinsatz_number
from .dual import estimate_w, scan_linear_form
from .exactnum import DoublyExponential, Explicit, GeometricCeil, Interval, LacunarySpec, RealHandle
from .exponents import conjecture_evidence, estimate_lambda, estimate_lambda_hat
from .formulas import (
    besten_transfer,
    bestens_bounds,
    hausdorff_dim,
    holds_lower_bound,
    neuko_bound,
    spectrum_formula,
    theo_bound,
    transference_check,
    uniform_bounds,
)
from .simul import C0, good_candidates, liouville_witness, scan_Mx, verify_lemma2, verify_lemma3

__version__ = "0.1.0"

__all__ = [
    "RealHandle", "LacunarySpec", "GeometricCeil", "Explicit", "DoublyExponential", "Interval",
    "convergents", "best_approximations", "decompose", "check_prop1",
    "C0", "scan_Mx", "verify_lemma2", "good_candidates", "verify_lemma3", "liouville_witness",
    "scan_linear_form", "estimate_w",
    "estimate_lambda", "estimate_lambda_hat", "conjecture_evidence",
    "spectrum_formula", "bestens_bounds", "besten_transfer", "holds_lower_bound", "theo_bound",
    "uniform_bounds", "hausdorff_dim", "transference_check", "neuko_bound",
    "bugeaud_number", "meinsatz_number", "digit_membership",
]
