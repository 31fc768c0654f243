"""Piecewise-linear finite elements and the Ritz projection.

The Ritz projection of sin(pi x) converges at second order in L2, which is
what keeps the spatial rates of the time-stepping schemes at two. In 1D it
coincides with the nodal interpolant, so the error is measured against the
exact function with a 5-point Gauss rule on every cell.
"""

import numpy as np

from varfdw.fem import Mesh, assemble, ritz_project

u = lambda x: np.sin(np.pi * x)
du = lambda x: np.pi * np.cos(np.pi * x)
xg, wg = np.polynomial.legendre.leggauss(5)


def l2_error(space, coef):
    J, h = space.mesh.J, space.mesh.h[0]
    nodal = np.concatenate([[0.0], coef, [0.0]])
    left = h * np.arange(J)
    s = 0.5 * (xg + 1)
    x = left[:, None] + h * s[None, :]
    uh = nodal[:-1, None] * (1 - s) + nodal[1:, None] * s
    return np.sqrt(np.sum(0.5 * h * wg * (uh - u(x)) ** 2))


prev = None
print("  J    L2 error of Ritz projection   rate")
for J in (8, 16, 32, 64, 128):
    space = assemble(Mesh(1, (0.0, 1.0), J))
    err = l2_error(space, ritz_project(space, du))
    rate = "" if prev is None else f"{np.log2(prev / err):.2f}"
    print(f"{J:4d}    {err:.4e}                 {rate}")
    prev = err

space = assemble(Mesh(2, ((0.0, 1.0), (0.0, 1.0)), 16))
print(f"\n2D mesh J=16: {space.ndof} interior dofs, nnz(S)={space.S.nnz}")
