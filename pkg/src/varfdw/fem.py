"""Piecewise-linear (1D) and bilinear (2D) finite elements on uniform grids.

Only interior degrees of freedom are kept (homogeneous Dirichlet data).
Nodal vectors of a 2D space are ordered with the x index slowest, i.e.
``U.reshape(J-1, J-1)[i-1, j-1]`` is the value at ``(x_i, y_j)``.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

__all__ = [
    "Mesh",
    "FemSpace",
    "assemble",
    "ritz_project",
    "solve_spd",
    "factorize_spd",
    "l2_inner",
    "l2_norm",
]

_NQ = 4  # Gauss points per element per axis


@dataclass(frozen=True)
class Mesh:
    """Uniform mesh of an interval (dim=1) or rectangle (dim=2).

    ``domain`` is ``(a, b)`` or ``((a, b), (c, d))``; ``J`` subdivisions per
    axis.
    """

    dim: int
    domain: tuple
    J: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("only 1D and 2D meshes are supported")
        if self.J < 2:
            raise ValueError(f"need J >= 2 subdivisions, got {self.J}")
        axes = (self.domain,) if self.dim == 1 else tuple(self.domain)
        try:
            ok = len(axes) == self.dim and all(len(ax) == 2 and ax[1] > ax[0] for ax in axes)
        except TypeError:
            ok = False
        if not ok:
            raise ValueError(f"bad domain {self.domain!r} for dim={self.dim}")

    @property
    def axes(self):
        return (tuple(self.domain),) if self.dim == 1 else tuple(tuple(a) for a in self.domain)

    @property
    def h(self):
        return tuple((b - a) / self.J for a, b in self.axes)

    @property
    def ndof(self):
        return (self.J - 1) ** self.dim

    def refined(self):
        return Mesh(self.dim, self.domain, 2 * self.J)


def _mass_1d(J, h):
    n = J - 1
    return sp.diags([np.full(n - 1, h / 6), np.full(n, 4 * h / 6), np.full(n - 1, h / 6)],
                    [-1, 0, 1], format="csr")


def _stiff_1d(J, h):
    n = J - 1
    return sp.diags([np.full(n - 1, -1 / h), np.full(n, 2 / h), np.full(n - 1, -1 / h)],
                    [-1, 0, 1], format="csr")


def _load_operators(a, J, h):
    """Quadrature points xq and operators B, D with
    (B @ f(xq))[i] = ∫ f φ_i,  (D @ f(xq))[i] = ∫ f φ_i'."""
    r, wr = np.polynomial.legendre.leggauss(_NQ)
    r, wr = 0.5 * (r + 1.0), 0.5 * wr
    elem = np.arange(J)
    xq = (a + h * (elem[:, None] + r[None, :])).ravel()
    wq = np.tile(h * wr, J)
    B = np.zeros((J - 1, J * _NQ))
    D = np.zeros((J - 1, J * _NQ))
    for i in range(1, J):
        # node i is the right end of element i-1 and the left end of element i
        left = slice((i - 1) * _NQ, i * _NQ)
        right = slice(i * _NQ, (i + 1) * _NQ)
        B[i - 1, left] = wq[left] * r
        B[i - 1, right] = wq[right] * (1.0 - r)
        D[i - 1, left] = wq[left] / h
        D[i - 1, right] = -wq[right] / h
    return xq, B, D


@dataclass
class FemSpace:
    """Mass and stiffness matrices on interior dofs of a uniform mesh."""

    mesh: Mesh
    M: sp.csr_matrix
    S: sp.csr_matrix
    _factors: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return self.mesh.dim

    @property
    def ndof(self):
        return self.mesh.ndof

    @property
    def cell_volume(self):
        return float(np.prod(self.mesh.h))

    def nodes(self):
        """Interior node coordinates: x (1D) or (X, Y) flattened (2D)."""
        coords = [a + h * np.arange(1, self.mesh.J) for (a, _), h in zip(self.mesh.axes, self.mesh.h)]
        if self.dim == 1:
            return coords[0]
        X, Y = np.meshgrid(coords[0], coords[1], indexing="ij")
        return X.ravel(), Y.ravel()

    def interpolate(self, func):
        """Nodal interpolant at interior nodes."""
        nodes = self.nodes()
        vals = func(nodes) if self.dim == 1 else func(*nodes)
        return np.broadcast_to(np.asarray(vals, dtype=float), (self.ndof,)).copy()

    def _ops(self):
        if "ops" not in self._factors:
            self._factors["ops"] = [_load_operators(a, self.mesh.J, h)
                                    for (a, _), h in zip(self.mesh.axes, self.mesh.h)]
        return self._factors["ops"]

    def load(self, func):
        """Load vector (func, φ_i) by 4-point Gauss per element per axis."""
        ops = self._ops()
        if self.dim == 1:
            xq, B, _ = ops[0]
            return B @ np.broadcast_to(func(xq), xq.shape)
        (xq, Bx, _), (yq, By, _) = ops
        F = np.broadcast_to(func(xq[:, None], yq[None, :]), (len(xq), len(yq)))
        return (Bx @ F @ By.T).ravel()

    def grad_load(self, grad):
        """Vector (∇φ, ∇φ_i) for a gradient field ``grad``.

        In 1D ``grad(x)`` returns φ'(x); in 2D ``grad(x, y)`` returns the pair
        (φ_x, φ_y).
        """
        ops = self._ops()
        if self.dim == 1:
            xq, _, D = ops[0]
            return D @ np.broadcast_to(grad(xq), xq.shape)
        (xq, Bx, Dx), (yq, By, Dy) = ops
        gx, gy = grad(xq[:, None], yq[None, :])
        shape = (len(xq), len(yq))
        gx, gy = np.broadcast_to(gx, shape), np.broadcast_to(gy, shape)
        return (Dx @ gx @ By.T + Bx @ gy @ Dy.T).ravel()

    def restrict_fine(self, u_fine):
        """Values of a field on the refined mesh at this mesh's interior nodes."""
        if self.dim == 1:
            return u_fine[1::2]
        n = 2 * self.mesh.J - 1
        return u_fine.reshape(n, n)[1::2, 1::2].ravel()

    def factorize(self, A, key=None):
        """Cached SPD factorization of ``A``; returns a solve callable."""
        if key is not None and key in self._factors:
            return self._factors[key]
        solver = factorize_spd(A)
        if key is not None:
            self._factors[key] = solver
        return solver


def assemble(mesh):
    """Assemble mass and stiffness matrices on the interior dofs of ``mesh``."""
    hs = mesh.h
    M1 = [_mass_1d(mesh.J, h) for h in hs]
    S1 = [_stiff_1d(mesh.J, h) for h in hs]
    if mesh.dim == 1:
        M, S = M1[0], S1[0]
    else:
        M = sp.kron(M1[0], M1[1], format="csr")
        S = (sp.kron(S1[0], M1[1]) + sp.kron(M1[0], S1[1])).tocsr()
    return FemSpace(mesh=mesh, M=M, S=S)


def _is_tridiagonal(A):
    coo = A.tocoo()
    return np.all(np.abs(coo.row - coo.col) <= 1)


def factorize_spd(A):
    """Factor a sparse SPD matrix once; returns ``solve(b) -> x``.

    Tridiagonal matrices use banded Cholesky, others sparse LU.
    """
    A = sp.csr_matrix(A)
    n = A.shape[0]
    if n == 1:
        d = float(A[0, 0])
        if not d > 0:
            raise np.linalg.LinAlgError("matrix is not positive definite")
        return lambda b: np.asarray(b, dtype=float) / d
    if _is_tridiagonal(A):
        ab = np.zeros((2, n))
        ab[0, 1:] = A.diagonal(1)
        ab[1, :] = A.diagonal()
        cb = sla.cholesky_banded(ab)
        return lambda b: sla.cho_solve_banded((cb, False), b)
    lu = spla.splu(A.tocsc())
    return lu.solve


def solve_spd(A, b, rtol=1e-12):
    """Solve A x = b for sparse SPD ``A`` and check the relative residual."""
    b = np.asarray(b, dtype=float)
    x = factorize_spd(A)(b)
    nb = np.linalg.norm(b)
    if nb > 0:
        res = np.linalg.norm(A @ x - b) / nb
        if res > rtol:
            raise RuntimeError(f"SPD solve residual {res:.3e} exceeds {rtol:.1e}")
    return x


def ritz_project(space, grad_u):
    """Ritz projection coefficients: S x = ((∇u, ∇φ_i))_i."""
    return factorize_spd(space.S)(space.grad_load(grad_u))


def l2_inner(space, u, v):
    """Mass-matrix inner product u^T M v."""
    u, v = np.asarray(u), np.asarray(v)
    if u.shape != (space.ndof,) or v.shape != (space.ndof,):
        raise ValueError(f"expected vectors of length {space.ndof}")
    return float(u @ (space.M @ v))


def l2_norm(space, u, lumped=True):
    """Discrete L2 norm; the lumped form (h^d Σ u_j^2)^(1/2) is the reported one."""
    u = np.asarray(u)
    if u.shape != (space.ndof,):
        raise ValueError(f"expected a vector of length {space.ndof}, got {u.shape}")
    if lumped:
        return float(np.sqrt(space.cell_volume * np.dot(u, u)))
    return float(np.sqrt(l2_inner(space, u, u)))
