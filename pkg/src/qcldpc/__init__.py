"""Analysis toolkit for QC-LDPC codes.

Covers the structural side (exponent matrices, Tanner-graph cycles, EMD
spectra, shift-automorphism orbits), decoder-driven trapping-set
enumeration with error impulses, importance-sampled trapping-set
weighting, and error-floor BER/FER prediction, plus a direct Monte-Carlo
simulator for cross-checking at simulable SNRs.
"""

from importlib import resources

from .code_model import (
    ExponentMatrix,
    ParityCheckMatrix,
    ParseError,
    expand,
    parse_alist,
    parse_exponent_matrix,
    write_alist,
)

__version__ = "0.1.0"


def bundled_code(name: str) -> ExponentMatrix:
    """Load one of the packaged example codes (``code1``, ``code5``)."""
    path = resources.files("qcldpc").joinpath(f"codes/{name}.exp")
    return parse_exponent_matrix(path.read_text())
