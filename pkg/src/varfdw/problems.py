"""Benchmark problems: four convergence examples and the transition setup."""

import numpy as np

from .exponent import (
    ConstantExponent,
    PolyOffsetExponent,
    SineOffsetExponent,
    TransitionExponent,
)
from .schemes import InitialDatum, ProblemSpec, Source

__all__ = ["example1", "example2", "example3", "example4", "transition_problems", "EXAMPLES"]

_PI = np.pi


def _sin_pi():
    return InitialDatum(lambda x: np.sin(_PI * x), lambda x: _PI * np.cos(_PI * x))


def example1(alpha0, kappa=1.0):
    """T=1/2, u0=sin(πx), ū0=sin(2πx), f=0, α(t)=α0+t^3/2."""
    return ProblemSpec(
        exponent=PolyOffsetExponent(alpha0, 0.5, 3, T=0.5), domain=(0.0, 1.0), T=0.5,
        u0=_sin_pi(),
        ubar0=InitialDatum(lambda x: np.sin(2 * _PI * x), lambda x: 2 * _PI * np.cos(2 * _PI * x)),
        source=Source.zero(), kappa=kappa, name=f"example1(alpha0={alpha0})")


def example2(alpha0, kappa=1.0):
    """T=1, u0=x^4(1-x)^4, ū0=x^2(1-x)^2, f=0, α(t)=α0+t^3/4."""
    return ProblemSpec(
        exponent=PolyOffsetExponent(alpha0, 0.25, 3, T=1.0), domain=(0.0, 1.0), T=1.0,
        u0=InitialDatum(lambda x: x**4 * (1 - x)**4,
                        lambda x: 4 * x**3 * (1 - x)**3 * (1 - 2 * x)),
        ubar0=InitialDatum(lambda x: x**2 * (1 - x)**2,
                           lambda x: 2 * x * (1 - x) * (1 - 2 * x)),
        source=Source.zero(), kappa=kappa, name=f"example2(alpha0={alpha0})")


def example3(alpha0, case="a", kappa=1.0):
    """T=1, f=1, α(t)=α0+sin(t)/8.

    Case ``a``: u0=sin(πx), ū0=x^2(1-x)^2. Case ``b``: u0=x^(-1/4) and ū0 the
    indicator of (0, 1/2]; both enter by nodal interpolation.
    """
    if case == "a":
        u0 = _sin_pi()
        ubar0 = InitialDatum(lambda x: x**2 * (1 - x)**2)
    elif case == "b":
        u0 = InitialDatum(lambda x: x ** -0.25)
        ubar0 = InitialDatum(lambda x: (x <= 0.5).astype(float))
    else:
        raise ValueError(f"case must be 'a' or 'b', got {case!r}")
    return ProblemSpec(
        exponent=SineOffsetExponent(alpha0, 1 / 8, T=1.0), domain=(0.0, 1.0), T=1.0,
        u0=u0, ubar0=ubar0, source=Source.constant(1.0), kappa=kappa,
        name=f"example3{case}(alpha0={alpha0})")


def example4(alpha0, kappa=1.0):
    """Unit square, T=1, u0=sin(πx)sin(πy), ū0=x²(1-x)²y²(1-y)², f=1, α(t)=α0+sin(t)/9."""
    def u0(x, y):
        return np.sin(_PI * x) * np.sin(_PI * y)

    def u0_grad(x, y):
        return (_PI * np.cos(_PI * x) * np.sin(_PI * y), _PI * np.sin(_PI * x) * np.cos(_PI * y))

    return ProblemSpec(
        exponent=SineOffsetExponent(alpha0, 1 / 9, T=1.0), domain=((0.0, 1.0), (0.0, 1.0)), T=1.0,
        u0=InitialDatum(u0, u0_grad),
        ubar0=InitialDatum(lambda x, y: x**2 * (1 - x)**2 * y**2 * (1 - y)**2),
        source=Source.constant(1.0), kappa=kappa, dim=2, name=f"example4(alpha0={alpha0})")


EXAMPLES = {
    "example1": example1,
    "example2": example2,
    "example3a": lambda a, kappa=1.0: example3(a, "a", kappa),
    "example3b": lambda a, kappa=1.0: example3(a, "b", kappa),
    "example4": example4,
}


def transition_problems(T=15.0, z_wave=1.9, z_diff=1.4, horizon=1.0, kappa=1.0):
    """Three problems on (0, 2) with f = exp(-t) exp(-(x-1)^2/2) and zero data.

    Returns a dict keyed ``u_19``, ``u_14``, ``u_var``: constant exponents
    ``z_wave`` and ``z_diff``, and an exponent moving from ``z_wave`` to
    ``z_diff`` over [0, horizon] and constant afterwards.
    """
    src = Source.exp_decay(lambda x: np.exp(-0.5 * (x - 1.0) ** 2), rate=1.0)
    exps = {
        "u_19": ConstantExponent(z_wave, T=T),
        "u_14": ConstantExponent(z_diff, T=T),
        "u_var": TransitionExponent(z_diff, z_wave, horizon, T=T),
    }
    return {key: ProblemSpec(exponent=e, domain=(0.0, 2.0), T=T, u0=InitialDatum.zero(),
                             ubar0=InitialDatum.zero(), source=src, kappa=kappa, name=key)
            for key, e in exps.items()}
