"""Variable exponents alpha(t) in (1, 2) and the generalized identity function.

The generalized identity function is

    g(t) = ∫_0^1 (tz)^(α0 - α(tz)) / (Γ(α0-1) Γ(2-α(tz))) (1-z)^(α0-2) z^(1-α0) dz,

the convolution of β_{α0-1} with the variable-exponent Abel kernel. It is
identically one for a constant exponent.
"""

from functools import lru_cache

import numpy as np

from .quadrature import gauss_jacobi_rule, gauss_legendre
from .special import gamma

__all__ = [
    "ExponentFunction",
    "ConstantExponent",
    "PolyOffsetExponent",
    "SineOffsetExponent",
    "TransitionExponent",
    "SmoothedExponent",
    "make_transition_exponent",
    "smooth_exponent",
    "eval_alpha",
    "g_quadrature",
    "eval_g",
]

_SAMPLES = 4001


class ExponentFunction:
    """Base class for the closed family of admissible exponents.

    Subclasses implement ``_value(t)`` and ``_deriv(t, order)`` for
    ``order`` in 1..3 on arrays. ``T`` is the horizon on which the exponent
    is validated.
    """

    kind = "abstract"
    breakpoints = ()

    def __init__(self, T):
        if not T > 0:
            raise ValueError(f"horizon T must be positive, got {T}")
        self.T = float(T)

    def _validate(self):
        self.alpha0 = float(self(0.0))
        ts = np.union1d(np.linspace(0.0, self.T, _SAMPLES),
                        [b for b in self.breakpoints if b <= self.T])
        vals = self(ts)
        if not (np.all(vals > 1.0) and np.all(vals < 2.0)):
            bad = ts[(vals <= 1.0) | (vals >= 2.0)][0]
            raise ValueError(
                f"{self.kind} exponent leaves (1, 2) on [0, {self.T}] "
                f"(alpha({bad:.6g}) = {float(self(bad)):.6g})")

    def __call__(self, t):
        ta = np.asarray(t, dtype=float)
        out = self._value(ta)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, t, order=1):
        """``order``-th derivative (0 <= order <= 3) at ``t``."""
        if order == 0:
            return self(t)
        if order not in (1, 2, 3):
            raise ValueError("only derivatives of order 1..3 are available")
        ta = np.asarray(t, dtype=float)
        out = self._deriv(ta, order)
        return float(out) if np.ndim(out) == 0 else out

    def __repr__(self):
        return f"{type(self).__name__}(alpha0={self.alpha0!r}, T={self.T!r})"


class ConstantExponent(ExponentFunction):
    kind = "constant"

    def __init__(self, alpha0, T=1.0):
        super().__init__(T)
        self._a = float(alpha0)
        self._validate()

    def _value(self, t):
        return np.full_like(t, self._a)

    def _deriv(self, t, order):
        return np.zeros_like(t)


class PolyOffsetExponent(ExponentFunction):
    """alpha(t) = alpha0 + c * t**p."""

    kind = "poly_offset"

    def __init__(self, alpha0, c, p, T=1.0):
        super().__init__(T)
        if p < 0:
            raise ValueError("power p must be non-negative")
        self._a, self.c, self.p = float(alpha0), float(c), float(p)
        self._validate()

    def _value(self, t):
        return self._a + self.c * t ** self.p

    def _deriv(self, t, order):
        coef = self.c
        for k in range(order):
            coef *= self.p - k
        if coef == 0.0:
            return np.zeros_like(t)
        return coef * t ** (self.p - order)


class SineOffsetExponent(ExponentFunction):
    """alpha(t) = alpha0 + amp * sin(t)."""

    kind = "sine_offset"

    def __init__(self, alpha0, amp, T=1.0):
        super().__init__(T)
        self._a, self.amp = float(alpha0), float(amp)
        self._validate()

    def _value(self, t):
        return self._a + self.amp * np.sin(t)

    def _deriv(self, t, order):
        return self.amp * (np.cos(t), -np.sin(t), -np.cos(t))[order - 1]


class TransitionExponent(ExponentFunction):
    """Monotone transition from z2 at t=0 to z1 at t=horizon.

    alpha(t) = z1 + (z2 - z1) * (1 - u - sin(2π(1-u))/(2π)),  u = t/horizon,

    held at z1 for t > horizon. First and second derivatives vanish at both
    ends of the transition window, so the held extension is C^2.
    """

    kind = "transition"

    def __init__(self, z1, z2, horizon, T=None):
        super().__init__(horizon if T is None else T)
        for name, z in (("z1", z1), ("z2", z2)):
            if not 1.0 < z < 2.0:
                raise ValueError(f"{name} must lie in (1, 2), got {z}")
        if not horizon > 0:
            raise ValueError("transition horizon must be positive")
        self.z1, self.z2, self.horizon = float(z1), float(z2), float(horizon)
        self.breakpoints = (self.horizon,) if self.horizon < self.T else ()
        self._validate()

    def _u(self, t):
        return np.minimum(t / self.horizon, 1.0)

    def _value(self, t):
        u = self._u(t)
        # sin(2π(1-u)) = -sin(2πu), exact at the endpoints
        s = 1.0 - u + np.sin(2.0 * np.pi * u) / (2.0 * np.pi)
        return self.z1 + (self.z2 - self.z1) * s

    def _deriv(self, t, order):
        u = self._u(t)
        w = 2.0 * np.pi * u
        if order == 1:
            ds = -1.0 + np.cos(w)
        elif order == 2:
            ds = -2.0 * np.pi * np.sin(w)
        else:
            ds = -4.0 * np.pi ** 2 * np.cos(w)
        ds = np.where(t > self.horizon, 0.0, ds)
        return (self.z2 - self.z1) * ds / self.horizon ** order


class SmoothedExponent(ExponentFunction):
    """Exponent flattened near t=0 so that alpha'(0) = alpha''(0) = 0.

    Equal to alpha0 on [0, sigma], to the base exponent on [2 sigma, T], and
    on [sigma, 2 sigma] to the degree-7 Hermite polynomial joining the two
    with matching value and first three derivatives.
    """

    kind = "smoothed"

    def __init__(self, base, sigma):
        super().__init__(base.T)
        if not 0.0 < 2.0 * sigma < base.T:
            raise ValueError(f"need 0 < 2*sigma < T, got sigma={sigma}, T={base.T}")
        self.base, self.sigma = base, float(sigma)
        self.breakpoints = tuple(sorted({self.sigma, 2.0 * self.sigma, *base.breakpoints}))
        self._coef = self._hermite_coefficients()
        self._validate()

    def _hermite_coefficients(self):
        # polynomial in s = (t - sigma)/sigma on [0, 1]; d^k/dt^k = sigma^-k d^k/ds^k
        s2 = 2.0 * self.sigma
        rhs = np.zeros(8)
        rhs[0] = self.base.alpha0
        rhs[4] = self.base(s2)
        for k in (1, 2, 3):
            rhs[4 + k] = self.base.derivative(s2, k) * self.sigma ** k
        A = np.zeros((8, 8))
        for k in range(4):
            for j in range(k, 8):
                fall = np.prod(np.arange(j - k + 1, j + 1, dtype=float))
                A[k, j] = fall if j == k else 0.0   # at s=0 only the s^k term survives
                A[4 + k, j] = fall                  # at s=1 every s^j contributes
        return np.linalg.solve(A, rhs)

    def _poly(self, t, order):
        s = (t - self.sigma) / self.sigma
        c = np.polynomial.polynomial.polyder(self._coef, order) if order else self._coef
        return np.polynomial.polynomial.polyval(s, c) / self.sigma ** order

    def _value(self, t):
        lo, hi = self.sigma, 2.0 * self.sigma
        a0 = self.base.alpha0
        return np.where(t <= lo, a0,
                        np.where(t >= hi, self.base(t), self._poly(t, 0)))

    def _deriv(self, t, order):
        lo, hi = self.sigma, 2.0 * self.sigma
        return np.where(t <= lo, 0.0,
                        np.where(t >= hi, self.base.derivative(t, order), self._poly(t, order)))


def eval_alpha(f, t):
    """Evaluate the exponent ``f`` at time(s) ``t`` in [0, T]."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0) or np.any(ta > f.T * (1 + 1e-12)):
        raise ValueError(f"t outside [0, {f.T}]")
    return f(t)


def make_transition_exponent(z1, z2, T):
    """The transition family a(t; z1, z2) on [0, T] with a(0)=z2, a(T)=z1."""
    return TransitionExponent(z1, z2, horizon=T, T=T)


def smooth_exponent(f, sigma):
    """Return the smoothed version of ``f`` satisfying alpha'(0)=alpha''(0)=0."""
    return SmoothedExponent(f, sigma)


# -- generalized identity function ------------------------------------------

_SUBST_POWER = 4


def g_quadrature(alpha0, n=16, rel_tol=1e-12, max_nodes=512):
    """Gauss–Jacobi rule for the kernel weight (1-z)^(α0-2) z^(1-α0)."""
    return gauss_jacobi_rule(n, alpha0 - 2.0, 1.0 - alpha0,
                             rel_tol=rel_tol, max_nodes=max_nodes)


@lru_cache(maxsize=256)
def _jacobi(n, a, b):
    q = gauss_jacobi_rule(n, a, b)
    return q.nodes, q.weights


@lru_cache(maxsize=64)
def _legendre(n):
    return gauss_legendre(n)


def _smooth_factor(f, t, z, c0):
    """(tz)^(α0-α(tz)) / (Γ(α0-1)Γ(2-α(tz))) for t of shape (m,1), z (m,n)."""
    tz = t * z
    a = f(tz)
    return np.exp((f.alpha0 - a) * np.log(tz)) / (c0 * gamma(2.0 - a))


def _g_group(f, t, cuts, n):
    """g at times t (shape (m,)) whose z-interval is split at cuts (m, k)."""
    a, b = f.alpha0 - 2.0, 1.0 - f.alpha0
    c0 = gamma(f.alpha0 - 1.0)
    p = _SUBST_POWER
    tt = t[:, None]
    bounds = np.hstack([np.zeros((len(t), 1)), cuts, np.ones((len(t), 1))])
    total = np.zeros(len(t))
    nseg = bounds.shape[1] - 1
    for i in range(nseg):
        zl, zr = bounds[:, i:i + 1], bounds[:, i + 1:i + 2]
        dz = zr - zl
        last = i == nseg - 1
        if i == 0:
            # z = dz * u^p removes the z log z behaviour at the origin
            u, w = _jacobi(n, a if last else 0.0, p * (b + 1.0) - 1.0)
            z = dz * u ** p
            if last:
                extra = np.sum(u[:, None] ** np.arange(p), axis=1) ** a
            else:
                extra = (1.0 - z) ** a
            vals = p * dz ** (b + 1.0) * extra * _smooth_factor(f, tt, z, c0)
        elif last:
            s, w = _jacobi(n, a, 0.0)
            z = zl + dz * s
            vals = dz ** (a + 1.0) * z ** b * _smooth_factor(f, tt, z, c0)
        else:
            s, w = _legendre(n)
            z = zl + dz * s
            vals = dz * z ** b * (1.0 - z) ** a * _smooth_factor(f, tt, z, c0)
        total += vals @ w
    return total


def _g_fixed(f, t, n):
    out = np.empty_like(t)
    bps = np.asarray([bp for bp in f.breakpoints if bp > 0])
    active = (t[:, None] > bps[None, :]).sum(axis=1) if len(bps) else np.zeros(len(t), int)
    for k in np.unique(active):
        idx = np.nonzero(active == k)[0]
        cuts = bps[None, :k] / t[idx, None]
        out[idx] = _g_group(f, t[idx], cuts, n)
    return out


def eval_g(f, t, q=None):
    """Generalized identity function g(t) of the exponent ``f``.

    Parameters
    ----------
    f : ExponentFunction
    t : float or array_like
        Times, t >= 0. ``g(0) = 1`` by continuity.
    q : GQuadrature, optional
        Supplies the starting node count, ``rel_tol`` and ``max_nodes``;
        defaults to :func:`g_quadrature` with 16 nodes.

    Returns
    -------
    float or ndarray

    Notes
    -----
    The singular weight is integrated exactly by Gauss–Jacobi rules. The
    first subinterval is mapped by z = u^4 since the smooth factor behaves
    like z log z at the origin when alpha'(0) != 0. Breakpoints of piecewise
    exponents split the z-interval. Node counts double until successive
    values agree to ``rel_tol``.
    """
    if q is None:
        q = g_quadrature(f.alpha0)
    elif abs(q.a - (f.alpha0 - 2.0)) > 1e-14 or abs(q.b - (1.0 - f.alpha0)) > 1e-14:
        raise ValueError("quadrature weight does not match alpha0 of the exponent")
    ta = np.asarray(t, dtype=float)
    scalar = ta.ndim == 0
    ta = np.atleast_1d(ta).ravel()
    if np.any(ta < 0):
        raise ValueError("g is defined for t >= 0 only")
    out = np.ones_like(ta)
    pos = ta > 0
    if np.any(pos):
        tp = ta[pos]
        n = q.node_count
        prev = _g_fixed(f, tp, n)
        while True:
            n *= 2
            if n > q.max_nodes:
                raise RuntimeError(
                    f"g quadrature did not reach rel_tol={q.rel_tol} with "
                    f"{q.max_nodes} nodes; exponent may be inadmissible")
            cur = _g_fixed(f, tp, n)
            if np.max(np.abs(cur - prev) / np.maximum(np.abs(cur), 1e-300)) <= q.rel_tol:
                break
            prev = cur
        out[pos] = cur
    return float(out[0]) if scalar else out.reshape(np.shape(t))
