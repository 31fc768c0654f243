"""Gamma and Beta functions for real arguments.

Thin wrappers over :mod:`scipy.special` (Lanczos-type evaluation, about one
ulp on the arguments used here) that return Python floats for scalar input
and ``inf`` at the poles of Γ.
"""

import numpy as np
from scipy import special as _sps


def gamma(x):
    """Gamma function of a real scalar or array; poles give ``inf``."""
    xa = np.asarray(x, dtype=float)
    out = _sps.gamma(xa)
    poles = (xa <= 0) & (xa == np.round(xa))
    out = np.where(poles, np.inf, out)
    return float(out) if out.ndim == 0 else out


def beta(a, b):
    """Euler Beta function B(a, b) for a, b > 0."""
    out = _sps.beta(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    return float(out) if np.ndim(out) == 0 else out
