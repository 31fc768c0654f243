"""The kernel function g(t) for a variable exponent.

g equals 1 for a constant exponent and departs from it as alpha(t) moves
away from alpha(0). The second part flattens an exponent near t=0 over a
window of width sigma; since alpha'(0) is nonzero the gap shrinks linearly.
"""

import numpy as np

from varfdw.exponent import (
    ConstantExponent,
    SineOffsetExponent,
    eval_g,
    g_quadrature,
    smooth_exponent,
)

t = np.linspace(0.0, 1.0, 6)
for f in (ConstantExponent(1.5), SineOffsetExponent(1.4, 1 / 8), SineOffsetExponent(1.85, 1 / 8)):
    q = g_quadrature(f.alpha0)
    print(f"alpha(0)={f.alpha0:<5g} g(t) =", np.array2string(eval_g(f, t, q), precision=6))

f = SineOffsetExponent(1.4, 1 / 8)
ts = np.linspace(0.0, 1.0, 20001)
print("\nsigma      max |alpha - alpha_sigma|")
for sigma in (0.08, 0.04, 0.02, 0.01):
    dev = np.abs(f(ts) - smooth_exponent(f, sigma)(ts)).max()
    print(f"{sigma:<9g}  {dev:.4e}")
