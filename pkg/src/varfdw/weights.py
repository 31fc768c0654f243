"""Temporal quadrature weights.

* kernel increments ``w_k = g(t_{k+1}) - g(t_k)`` of the piecewise-linear
  treatment of the g' memory term;
* second-order convolution quadrature weights ``chi_n`` generated by
  ``[(1-ζ)(3-ζ)/2]^(-abar)`` and their starting corrections ``omega_n``;
* averaged product-integration weights for the fractional integral of
  order ``abar``, stored by lag since they are translation invariant.
"""

from dataclasses import dataclass

import numpy as np

from .exponent import eval_g
from .special import gamma

__all__ = [
    "WeightTables",
    "binomial_series",
    "kernel_increments",
    "cq_weights",
    "correction_weights",
    "pi_weights",
    "build_tables",
]


@dataclass(frozen=True)
class WeightTables:
    """All precomputed weights of one run (N steps of size tau)."""

    tau: float
    abar: float
    w: np.ndarray           # w[k], k = 0..N-1
    chi: np.ndarray         # chi[j], j = 0..N-1
    omega_corr: np.ndarray  # omega_corr[n-1] holds omega_n, n = 1..N
    pi_diag: float
    pi_off: np.ndarray      # pi_off[m] for lag m = 1..N-1; pi_off[0] unused (nan)

    @property
    def N(self):
        return len(self.w)


def binomial_series(abar, n):
    """Coefficients of (1-ζ)^(-abar): c_0 = 1, c_k = c_{k-1}(k-1+abar)/k."""
    c = np.empty(n)
    c[0] = 1.0
    if n > 1:
        k = np.arange(1, n, dtype=float)
        c[1:] = np.cumprod((k - 1.0 + abar) / k)
    return c


def kernel_increments(f, q, N, tau):
    """w_k = g((k+1)τ) - g(kτ) for k = 0..N-1."""
    if N < 1 or not tau > 0:
        raise ValueError("need N >= 1 and tau > 0")
    g = eval_g(f, tau * np.arange(N + 1), q)
    return np.diff(g)


def cq_weights(abar, N):
    """Second-order (BDF2-generated) convolution quadrature weights χ_0..χ_{N-1}."""
    if not 0.0 < abar < 1.0:
        raise ValueError(f"abar must lie in (0, 1), got {abar}")
    c = binomial_series(abar, N)
    with np.errstate(under="ignore"):
        c3 = c * 3.0 ** -np.arange(N, dtype=float)
    return (2.0 / 3.0) ** abar * np.convolve(c, c3)[:N]


def correction_weights(chi, abar, N):
    """ω_n = n^abar/Γ(abar+1) - Σ_{j=1}^{n} χ_{n-j} for n = 1..N."""
    chi = np.asarray(chi)
    if len(chi) < N:
        raise ValueError(f"need at least {N} CQ weights, got {len(chi)}")
    n = np.arange(1, N + 1, dtype=float)
    # extended-precision running sum keeps the identity exact to a few ulps
    partial = np.cumsum(chi[:N].astype(np.longdouble))
    return (n ** abar / gamma(abar + 1.0) - partial).astype(float)


def _second_difference(p, m):
    """(m+1)^p - 2 m^p + (m-1)^p for integer lags m >= 1, without cancellation."""
    m = np.asarray(m, dtype=float)
    out = np.empty_like(m)
    near = m < 8
    mm = m[near]
    out[near] = (mm + 1) ** p - 2 * mm ** p + (mm - 1) ** p
    mf = m[~near]
    if mf.size:
        # m^p * Σ_{k even >= 2} 2 binom(p, k) m^-k; |1/m| <= 1/8 so 14 terms suffice
        x2 = mf ** -2.0
        s = np.zeros_like(mf)
        coef, xk = 1.0, np.ones_like(mf)
        for k in range(1, 29):
            coef *= (p - k + 1) / k
            if k % 2 == 0:
                xk = xk * x2
                s += 2.0 * coef * xk
        out[~near] = mf ** p * s
    return out


def pi_weights(abar, tau, N):
    """Averaged product-integration weights.

    With B(s) = s^(abar+1)/Γ(abar+2), returns ``pi_diag = B(τ)/τ`` and, by lag
    m >= 1, ``pi_off[m] = [B((m+1)τ) - 2B(mτ) + B((m-1)τ)]/τ``.
    """
    if not 0.0 < abar < 1.0:
        raise ValueError(f"abar must lie in (0, 1), got {abar}")
    scale = tau ** abar / gamma(abar + 2.0)
    off = np.full(max(N, 1), np.nan)
    if N > 1:
        off[1:] = scale * _second_difference(abar + 1.0, np.arange(1, N))
    return scale, off


def build_tables(f, N, tau, q=None):
    """Build every weight table for ``N`` steps of size ``tau``."""
    abar = f.alpha0 - 1.0
    w = kernel_increments(f, q, N, tau)
    chi = cq_weights(abar, N)
    omega = correction_weights(chi, abar, N)
    pd, po = pi_weights(abar, tau, N)
    return WeightTables(tau=tau, abar=abar, w=w, chi=chi, omega_corr=omega,
                        pi_diag=pd, pi_off=po)
