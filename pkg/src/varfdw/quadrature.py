"""Gauss rules on the unit interval.

Gauss–Jacobi rules are built by the Golub–Welsch algorithm from the
three-term recurrence of the Jacobi polynomials.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .special import beta


@dataclass(frozen=True)
class GQuadrature:
    """Gauss–Jacobi rule on (0, 1) for the weight (1-z)**a * z**b.

    ``rel_tol`` and ``max_nodes`` are carried along for adaptive users
    (see :func:`varfdw.exponent.eval_g`), which start from ``node_count``
    nodes and double until ``rel_tol`` is met.
    """

    a: float
    b: float
    nodes: np.ndarray
    weights: np.ndarray
    rel_tol: float = 1e-12
    max_nodes: int = 512

    @property
    def node_count(self):
        return len(self.nodes)

    def integrate(self, func):
        return float(np.dot(self.weights, func(self.nodes)))


def _jacobi_recurrence(n, a, b):
    """Monic recurrence coefficients of Jacobi polynomials on [-1, 1]."""
    k = np.arange(n, dtype=float)
    ab = a + b
    diag = np.empty(n)
    # k = 0 handled separately: 2k + a + b may vanish
    diag[0] = (b - a) / (ab + 2.0)
    if n > 1:
        kk = k[1:]
        diag[1:] = (b * b - a * a) / ((2 * kk + ab) * (2 * kk + ab + 2))
    off = np.empty(max(n - 1, 0))
    if n > 1:
        off[0] = 4.0 * (a + 1) * (b + 1) / ((ab + 2) ** 2 * (ab + 3))
        if n > 2:
            kk = k[2:]
            off[1:] = (4.0 * kk * (kk + a) * (kk + b) * (kk + ab)
                       / ((2 * kk + ab) ** 2 * (2 * kk + ab + 1) * (2 * kk + ab - 1)))
    return diag, np.sqrt(off)


def gauss_jacobi_rule(n, a, b, rel_tol=1e-12, max_nodes=512):
    """n-point Gauss rule for ∫_0^1 (1-z)^a z^b p(z) dz.

    Exact for polynomials of degree up to 2n-1.

    Parameters
    ----------
    n : int
        Number of nodes (>= 1).
    a, b : float
        Jacobi exponents, both > -1.

    Returns
    -------
    GQuadrature
    """
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    if a <= -1 or b <= -1:
        raise ValueError(f"Jacobi exponents must exceed -1, got a={a}, b={b}")
    diag, off = _jacobi_recurrence(n, a, b)
    if n == 1:
        x = diag.copy()
        v0 = np.ones(1)
    else:
        try:
            x, vecs = eigh_tridiagonal(diag, off)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise RuntimeError(f"Golub-Welsch eigensolve failed for n={n}") from exc
        v0 = vecs[0, :]
    mass = beta(a + 1.0, b + 1.0)
    nodes = 0.5 * (x + 1.0)
    weights = mass * v0 ** 2
    return GQuadrature(a=float(a), b=float(b), nodes=nodes, weights=weights,
                       rel_tol=rel_tol, max_nodes=max_nodes)


def gauss_legendre(n):
    """Gauss–Legendre nodes and weights on (0, 1)."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w
