"""Convolution quadrature, correction and product-integration weights.

Builds the three weight families for a constant fractional order and checks
the identities they satisfy: the correction weights close the gap between
the CQ partial sums and n^abar/Gamma(abar+1), and the averaged PI weights of
one row telescope to the step average of s^abar/Gamma(abar+1).
"""

import numpy as np
from scipy.special import gamma

from varfdw.weights import correction_weights, cq_weights, pi_weights

abar, N, tau = 0.5, 16, 1.0 / 16

chi = cq_weights(abar, N)
omega = correction_weights(chi, abar, N)
d, off = pi_weights(abar, tau, N)

print(" n        chi_n       omega_n      pi_off_n")
for n in range(N):
    pi = d if n == 0 else off[n]
    print(f"{n:2d}  {chi[n]: .6e}  {omega[n]: .6e}  {pi: .6e}")

n = np.arange(1, N + 1)
gap = np.cumsum(chi) + omega - n ** abar / gamma(abar + 1)
print(f"\ncorrection identity, max residual: {np.abs(gap).max():.1e}")

row = d + off[1:N].sum()
exact = tau ** abar * (N ** (abar + 1) - (N - 1) ** (abar + 1)) / gamma(abar + 2)
print(f"PI row {N} sum {row:.15f} vs step average {exact:.15f}")
