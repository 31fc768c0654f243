"""Fully discrete schemes for the transformed diffusion-wave equation

    u_t + (g' * u_t)(t) - κ (β_abar * Δu)(t) = (β_abar * f)(t) + g(t) ū0,

with abar = α(0) - 1, homogeneous Dirichlet data, u(0) = u0, u_t(0) = ū0.

``Alpha0`` scheme: BDF2 in time, piecewise-linear treatment of the g'
memory, second-order convolution quadrature for the fractional integral,
applied to ũ = u - u0. Accuracy O(τ^α0 + h^2).

``SecondOrder`` scheme: time-averaged equation, midpoint treatment of the
g' memory and the averaged product-integration rule. Accuracy O(τ^2 + h^2).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gammaln

from .exponent import ExponentFunction, eval_g
from .fem import FemSpace, Mesh, assemble, factorize_spd, ritz_project
from .quadrature import gauss_legendre
from .special import gamma
from .weights import WeightTables, build_tables

__all__ = [
    "ALPHA0",
    "SECOND_ORDER",
    "SCHEMES",
    "InitialDatum",
    "Source",
    "ProblemSpec",
    "SolutionHistory",
    "rhs_scheme1",
    "rhs_scheme2",
    "step_scheme1",
    "step_scheme2",
    "initial_coefficients",
    "run",
]

ALPHA0 = "alpha0"
SECOND_ORDER = "second_order"
SCHEMES = (ALPHA0, SECOND_ORDER)


@dataclass(frozen=True)
class InitialDatum:
    """Initial field with optional analytic gradient.

    With a gradient the datum enters through its Ritz projection, otherwise
    through nodal interpolation at interior nodes.
    """

    value: object
    grad: object = None

    @classmethod
    def zero(cls):
        return cls(_zeros, _zero_grad)


def _zeros(*x):
    return np.zeros(np.broadcast(*x).shape)


def _zero_grad(*x):
    z = _zeros(*x)
    return z if len(x) == 1 else (z, z)


def _frac_const(c):
    def frac(mu, t):
        return c * np.asarray(t, dtype=float) ** mu / gamma(mu + 1.0)
    return frac


def _frac_exp(rate):
    def frac(mu, t):
        # β_mu * e^{-rate s} = e^{-rate t} Σ_k rate^k t^{mu+k} / (k! (mu+k) Γ(mu))
        t = np.asarray(t, dtype=float)
        if rate == 0:
            return t ** mu / gamma(mu + 1.0)
        k = np.arange(int(abs(rate) * float(np.max(t, initial=0.0))) + 60)
        tt = np.maximum(t, np.finfo(float).tiny)[..., None]
        log_terms = k * np.log(abs(rate)) - gammaln(k + 1.0) + (mu + k) * np.log(tt)
        terms = np.sign(rate) ** k * np.exp(log_terms) / (mu + k)
        out = np.exp(-rate * t) * terms.sum(axis=-1) / gamma(mu)
        return np.where(t > 0, out, 0.0)
    return frac


class Source:
    """Source term f(x, t).

    Separable sources ``spatial(x) * temporal(t)`` may carry a closed form
    ``frac_integral(mu, t)`` of the fractional integral (β_mu * temporal)(t).
    Without it, the fractional integrals are evaluated by product
    integration with f sampled at step midpoints. Non-separable sources
    are given as ``func(x, t)`` (1D) or ``func(x, y, t)`` (2D).
    """

    def __init__(self, spatial=None, temporal=None, frac_integral=None, func=None):
        if func is None and spatial is None:
            raise ValueError("give either spatial/temporal parts or func")
        self.spatial, self.temporal, self.frac_integral, self.func = spatial, temporal, frac_integral, func
        self.is_zero = False

    @classmethod
    def zero(cls):
        src = cls.constant(0.0)
        src.is_zero = True
        return src

    @classmethod
    def constant(cls, c=1.0):
        return cls(spatial=lambda *x: np.full_like(x[0], c, dtype=float),
                   temporal=lambda t: np.ones_like(np.asarray(t, dtype=float)),
                   frac_integral=_frac_const(1.0))

    @classmethod
    def exp_decay(cls, spatial, rate=1.0):
        """f(x, t) = spatial(x) * exp(-rate t)."""
        return cls(spatial=spatial, temporal=lambda t: np.exp(-rate * np.asarray(t, dtype=float)),
                   frac_integral=_frac_exp(rate))

    @property
    def separable(self):
        return self.func is None

    def loads(self, space, times):
        """Rows (f(·, t), φ_i) for each t in ``times``."""
        times = np.asarray(times, dtype=float)
        if self.separable:
            return np.outer(self.temporal(times), space.load(self.spatial))
        if space.dim == 1:
            return np.array([space.load(lambda x, t=t: self.func(x, t)) for t in times])
        return np.array([space.load(lambda x, y, t=t: self.func(x, y, t)) for t in times])


@dataclass
class ProblemSpec:
    """Data of one diffusion-wave problem."""

    exponent: ExponentFunction
    domain: tuple
    T: float
    u0: InitialDatum
    ubar0: InitialDatum
    source: Source
    kappa: float = 1.0
    dim: int = 1
    name: str = ""

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if not self.T > 0:
            raise ValueError("T must be positive")
        if self.exponent.T < self.T * (1 - 1e-12):
            raise ValueError("exponent horizon is shorter than the problem horizon")

    def mesh(self, J):
        return Mesh(self.dim, self.domain, J)


@dataclass
class SolutionHistory:
    """All time levels of a run.

    ``states`` holds the scheme unknowns (ũ^n for the Alpha0 scheme, u^n for
    SecondOrder); the approximation of u(t_n) is ``states[n] + offset``.
    """

    space: FemSpace
    scheme: str
    tau: float
    states: np.ndarray
    offset: np.ndarray
    solves: int = 0

    @property
    def N(self):
        return len(self.states) - 1

    def solution(self, n):
        return self.states[n] + self.offset

    @property
    def final(self):
        return self.solution(self.N)

    def times(self):
        return self.tau * np.arange(self.N + 1)


def initial_coefficients(space, datum, use_ritz=True):
    """Ritz projection of ``datum`` when a gradient is known, else nodal values."""
    if use_ritz and datum.grad is not None:
        return ritz_project(space, datum.grad)
    return space.interpolate(datum.value)


@dataclass
class _Context:
    problem: ProblemSpec
    space: FemSpace
    tables: WeightTables
    u0: np.ndarray
    ubar0: np.ndarray
    loads: dict = field(default_factory=dict)


def _conv_loads(problem, space, tables, averaged):
    """Fractional-integral part of the load at t_1..t_N (row n-1 is step n).

    Pointwise values (β_abar*f)(t_n) for the Alpha0 scheme, step averages
    (1/τ)∫_{t_{n-1}}^{t_n} (β_abar*f) dt for the SecondOrder scheme.
    """
    src, tau, abar, N = problem.source, tables.tau, tables.abar, tables.N
    if src.is_zero:
        return np.zeros((N, space.ndof))
    tn = tau * np.arange(N + 1)
    if src.separable and src.frac_integral is not None:
        vec = space.load(src.spatial)
        if averaged:
            F = src.frac_integral(abar + 1.0, tn)
            coef = np.diff(F) / tau
        else:
            coef = src.frac_integral(abar, tn[1:])
        return np.outer(coef, vec)
    # product integration with midpoint samples of f
    mid = tau * (np.arange(1, N + 1) - 0.5)
    fmid = src.loads(space, mid)
    if averaged:
        kern = np.concatenate(([tables.pi_diag], tables.pi_off[1:]))
    else:
        m = np.arange(N + 1, dtype=float)
        B1 = (m * tau) ** abar / gamma(abar + 1.0)
        kern = np.diff(B1)
    return fftconvolve(kern[:, None], fmid, axes=0)[:N]


def _context(problem, space, tables, use_ritz=True, q=None):
    return _Context(problem, space, tables,
                    u0=initial_coefficients(space, problem.u0, use_ritz),
                    ubar0=space.interpolate(problem.ubar0.value))


def _scheme1_loads(ctx, q=None):
    if ALPHA0 not in ctx.loads:
        pb, sp_, tb = ctx.problem, ctx.space, ctx.tables
        tn = tb.tau * np.arange(1, tb.N + 1)
        g = eval_g(pb.exponent, tn, q)
        conv = _conv_loads(pb, sp_, tb, averaged=False)
        beta1 = tn ** tb.abar / gamma(tb.abar + 1.0)
        Su0, Mub = sp_.S @ ctx.u0, sp_.M @ ctx.ubar0
        ctx.loads[ALPHA0] = conv - pb.kappa * np.outer(beta1, Su0) + np.outer(g, Mub)
    return ctx.loads[ALPHA0]


def _scheme2_loads(ctx, q=None):
    if SECOND_ORDER not in ctx.loads:
        pb, sp_, tb = ctx.problem, ctx.space, ctx.tables
        s, ws = gauss_legendre(2)
        t0 = tb.tau * np.arange(tb.N)
        gq = eval_g(pb.exponent, (t0[:, None] + tb.tau * s[None, :]).ravel(), q)
        gbar = gq.reshape(tb.N, 2) @ ws
        conv = _conv_loads(pb, sp_, tb, averaged=True)
        ctx.loads[SECOND_ORDER] = conv + np.outer(gbar, sp_.M @ ctx.ubar0)
    return ctx.loads[SECOND_ORDER]


def rhs_scheme1(problem, space, tables, n, use_ritz=True):
    """Load vector (F(t_n), φ_i) of the Alpha0 scheme, 1 <= n <= N.

    F(t) = (β_abar*f)(t) + κ β_{abar+1}(t) Δu0 + g(t) ū0, with the Laplacian of
    u0 moved onto the test functions.
    """
    _check_step(n, tables.N)
    return _scheme1_loads(_context(problem, space, tables, use_ritz))[n - 1]


def rhs_scheme2(problem, space, tables, n, use_ritz=True):
    """Load vector of the step average (1/τ)∫_{t_{n-1}}^{t_n} f̄ dt, 1 <= n <= N."""
    _check_step(n, tables.N)
    return _scheme2_loads(_context(problem, space, tables, use_ritz))[n - 1]


def _check_step(n, N):
    if not 1 <= n <= N:
        raise ValueError(f"step index {n} outside 1..{N}")


# -- steppers ------------------------------------------------------------------

def _lhs1(ctx, n):
    tb, kap = ctx.tables, ctx.problem.kappa
    cm = (1.0 + tb.w[0]) if n == 1 else (1.5 + tb.w[0])
    if not cm > 0:
        raise RuntimeError(f"mass coefficient {cm:.3e} not positive; time step too large")
    return cm / tb.tau * ctx.space.M + kap * tb.tau ** tb.abar * tb.chi[0] * ctx.space.S


def _rhs1(ctx, U, D, n, load):
    """Known part of step n of the Alpha0 scheme; U[k] = ũ^k, D[k] = ũ^k - ũ^{k-1}."""
    tb, sp_, kap = ctx.tables, ctx.space, ctx.problem.kappa
    tau = tb.tau
    if n == 1:
        mass = (1.0 + tb.w[0]) * U[0]
    else:
        mass = (2.0 + tb.w[0]) * U[n - 1] - 0.5 * U[n - 2] - tb.w[n - 1:0:-1] @ D[1:n]
    stiff = tb.chi[n - 1:0:-1] @ U[1:n] + tb.omega_corr[n - 1] * U[0]
    return load + sp_.M @ (mass / tau) - kap * tau ** tb.abar * (sp_.S @ stiff)


def _lhs2(ctx, n):
    tb, kap = ctx.tables, ctx.problem.kappa
    cm = 1.0 + 0.5 * tb.w[0]
    if not cm > 0:
        raise RuntimeError(f"mass coefficient {cm:.3e} not positive; time step too large")
    cs = tb.pi_diag if n == 1 else 0.5 * tb.pi_diag
    return cm / tb.tau * ctx.space.M + kap * cs * ctx.space.S


def _rhs2(ctx, U, H, n, load):
    """Known part of step n of the SecondOrder scheme; H[k] = (u^k + u^{k-1})/2."""
    tb, sp_, kap = ctx.tables, ctx.space, ctx.problem.kappa
    w = tb.w
    if n == 1:
        return load + sp_.M @ ((1.0 + 0.5 * w[0]) / tb.tau * U[0])
    dw = w[:n - 1] - w[1:n]                       # dw[k-1] = w_{k-1} - w_k, k = 1..n-1
    mem = (1.0 - 0.5 * w[0]) * U[n - 1] + dw @ H[n - 1:0:-1] + w[n - 1] * U[0]
    frac = tb.pi_off[n - 1] * U[1] + tb.pi_off[n - 2:0:-1] @ H[2:n] + 0.5 * tb.pi_diag * U[n - 1]
    return load + sp_.M @ (mem / tb.tau) - kap * (sp_.S @ frac)


def step_scheme1(problem, space, tables, history, n, use_ritz=True):
    """Solve step n of the Alpha0 scheme given ũ^0..ũ^{n-1} in ``history``."""
    _check_step(n, tables.N)
    U = np.asarray(history)[:n]
    if len(U) < n:
        raise ValueError(f"history must hold states 0..{n - 1}")
    ctx = _context(problem, space, tables, use_ritz)
    D = np.vstack([np.zeros((1, space.ndof)), np.diff(U, axis=0)])
    rhs = _rhs1(ctx, U, D, n, _scheme1_loads(ctx)[n - 1])
    return factorize_spd(_lhs1(ctx, n))(rhs)


def step_scheme2(problem, space, tables, history, n, use_ritz=True):
    """Solve step n of the SecondOrder scheme given u^0..u^{n-1} in ``history``."""
    _check_step(n, tables.N)
    U = np.asarray(history)[:n]
    if len(U) < n:
        raise ValueError(f"history must hold states 0..{n - 1}")
    ctx = _context(problem, space, tables, use_ritz)
    H = np.vstack([np.zeros((1, space.ndof)), 0.5 * (U[1:] + U[:-1])])
    rhs = _rhs2(ctx, U, H, n, _scheme2_loads(ctx)[n - 1])
    return factorize_spd(_lhs2(ctx, n))(rhs)


def run(problem, mesh, N, scheme=ALPHA0, use_ritz=True, q=None, space=None, tables=None):
    """Integrate ``problem`` on ``mesh`` with N uniform steps.

    Weight tables are built once; the left-hand matrix of step 1 and the
    (constant) one of steps n >= 2 are each factored once.

    Returns
    -------
    SolutionHistory
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    if N < 1:
        raise ValueError("need N >= 1")
    space = space if space is not None else assemble(mesh)
    tau = problem.T / N
    tables = tables if tables is not None else build_tables(problem.exponent, N, tau, q)
    ctx = _context(problem, space, tables, use_ritz)
    ndof = space.ndof
    U = np.zeros((N + 1, ndof))
    aux = np.zeros((N + 1, ndof))   # increments (Alpha0) or midpoints (SecondOrder)
    if scheme == ALPHA0:
        loads, lhs, rhs = _scheme1_loads(ctx, q), _lhs1, _rhs1
        offset = ctx.u0
    else:
        loads, lhs, rhs = _scheme2_loads(ctx, q), _lhs2, _rhs2
        U[0] = ctx.u0
        offset = np.zeros(ndof)
    solve_first = factorize_spd(lhs(ctx, 1))
    solve_rest = factorize_spd(lhs(ctx, 2)) if N > 1 else None
    solves = 0
    for n in range(1, N + 1):
        try:
            b = rhs(ctx, U, aux, n, loads[n - 1])
            U[n] = (solve_first if n == 1 else solve_rest)(b)
        except Exception as exc:
            raise RuntimeError(f"{scheme} step {n} of {N} failed: {exc}") from exc
        solves += 1
        aux[n] = U[n] - U[n - 1] if scheme == ALPHA0 else 0.5 * (U[n] + U[n - 1])
    return SolutionHistory(space=space, scheme=scheme, tau=tau, states=U,
                           offset=offset, solves=solves)
