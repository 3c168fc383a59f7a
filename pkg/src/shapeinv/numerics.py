"""Independent finite-difference machinery for checking analytic results.

Everything here works on plain sample arrays: a three-point Dirichlet
discretization of -psi'' + V psi, a Sturm-sequence bisection eigensolver with
inverse iteration, five-point derivative stencils, and composite Simpson
quadrature. None of it knows about superpotentials, so agreement with the
closed-form machinery is a genuine cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import BoundaryConditionError, PoleError

__all__ = [
    "Grid", "GridFunction", "TridiagonalSym", "hamiltonian_matrix",
    "eigen_lowest", "derivative", "integrate", "inner_product",
    "apply_hamiltonian", "adjointness_defect", "fix_sign",
    "NumericSpectrum", "spectrum_numeric",
]

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [x0, x1] with n nodes, endpoints included."""

    x0: float
    x1: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.x0) or not np.isfinite(self.x1):
            raise ValueError("grid endpoints must be finite")
        if not self.x1 > self.x0:
            raise ValueError("grid needs x1 > x0")
        if self.n < 16:
            raise ValueError("grid needs at least 16 nodes")

    @property
    def h(self) -> float:
        return (self.x1 - self.x0) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.n)


@dataclass(frozen=True)
class GridFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n,):
            raise ValueError("values must match the grid size")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable) -> "GridFunction":
        return cls(grid, np.asarray(fn(grid.x), dtype=float))

    def derivative(self, order: int = 1) -> "GridFunction":
        return GridFunction(self.grid, derivative(self.values, self.grid.h, order))

    def integrate(self) -> float:
        return integrate(self.values, self.grid.h)

    def norm(self) -> float:
        return float(np.sqrt(max(integrate(self.values ** 2, self.grid.h), 0.0)))


# ---------------------------------------------------------------------------
# stencils and quadrature

def derivative(values, h: Optional[float] = None, order: int = 1):
    """Five-point finite-difference derivative of uniformly sampled values.

    Accepts either a GridFunction (h is then taken from its grid) or a plain
    sample array together with the spacing h.
    """
    if isinstance(values, GridFunction):
        return values.derivative(order)
    if h is None:
        raise ValueError("sample arrays need the spacing h")
    v = np.asarray(values, dtype=float)
    n = v.size
    if n < 5:
        raise ValueError("five-point stencils need at least 5 samples")
    if order == 1:
        out = np.empty(n)
        out[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
        out[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2]
                  + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h)
        out[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2]
                  - 6.0 * v[3] + v[4]) / (12.0 * h)
        out[-1] = (25.0 * v[-1] - 48.0 * v[-2] + 36.0 * v[-3]
                   - 16.0 * v[-4] + 3.0 * v[-5]) / (12.0 * h)
        out[-2] = (3.0 * v[-1] + 10.0 * v[-2] - 18.0 * v[-3]
                   + 6.0 * v[-4] - v[-5]) / (12.0 * h)
        return out
    if order == 2:
        h2 = h * h
        out = np.empty(n)
        out[2:-2] = (-v[:-4] + 16.0 * v[1:-3] - 30.0 * v[2:-2]
                     + 16.0 * v[3:-1] - v[4:]) / (12.0 * h2)
        out[0] = (35.0 * v[0] - 104.0 * v[1] + 114.0 * v[2]
                  - 56.0 * v[3] + 11.0 * v[4]) / (12.0 * h2)
        out[1] = (11.0 * v[0] - 20.0 * v[1] + 6.0 * v[2]
                  + 4.0 * v[3] - v[4]) / (12.0 * h2)
        out[-1] = (35.0 * v[-1] - 104.0 * v[-2] + 114.0 * v[-3]
                   - 56.0 * v[-4] + 11.0 * v[-5]) / (12.0 * h2)
        out[-2] = (11.0 * v[-1] - 20.0 * v[-2] + 6.0 * v[-3]
                   + 4.0 * v[-4] - v[-5]) / (12.0 * h2)
        return out
    raise ValueError("order must be 1 or 2")


def integrate(values, h: Optional[float] = None) -> float:
    """Composite Simpson rule; a trapezoid picks up the last interval when the
    interval count is odd."""
    if isinstance(values, GridFunction):
        return integrate(values.values, values.grid.h)
    if h is None:
        raise ValueError("sample arrays need the spacing h")
    v = np.asarray(values, dtype=float)
    n = v.size
    if n < 2:
        raise ValueError("need at least 2 samples to integrate")
    if n == 2:
        return float(0.5 * h * (v[0] + v[1]))
    m = n if n % 2 == 1 else n - 1
    core = v[:m]
    total = (h / 3.0) * (core[0] + core[-1]
                         + 4.0 * np.sum(core[1:-1:2]) + 2.0 * np.sum(core[2:-1:2]))
    if n % 2 == 0:
        total += 0.5 * h * (v[-2] + v[-1])
    return float(total)


def inner_product(u, v, h: Optional[float] = None) -> float:
    if isinstance(u, GridFunction) and isinstance(v, GridFunction):
        if u.grid != v.grid:
            raise ValueError("inner product needs a shared grid")
        return integrate(u.values * v.values, u.grid.h)
    if h is None:
        raise ValueError("sample arrays need the spacing h")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError("inner product needs equal-length samples")
    return integrate(u * v, h)


# ---------------------------------------------------------------------------
# symmetric tridiagonal matrices

@dataclass(frozen=True)
class TridiagonalSym:
    """Symmetric tridiagonal matrix given by its diagonal and off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        if d.ndim != 1 or d.size < 1:
            raise ValueError("diagonal must be a nonempty 1-d array")
        if e.shape != (d.size - 1,):
            raise ValueError("off-diagonal must have one fewer entry")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def matvec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def _pivmin(self) -> float:
        e2max = float(np.max(self.offdiag * self.offdiag)) if self.offdiag.size else 0.0
        return max(e2max, 1.0) * np.finfo(float).tiny / _EPS

    def count_below(self, sigma: float) -> int:
        return int(self._count_below_vec(np.array([sigma]))[0])

    def _count_below_vec(self, sigmas: np.ndarray) -> np.ndarray:
        # Sturm sequence: number of eigenvalues strictly below each shift.
        # A vanishing pivot is clamped to -pivmin before it is counted, so a
        # shift landing exactly on a leading-minor eigenvalue still counts it.
        d = self.diag
        e2 = self.offdiag * self.offdiag
        pivmin = self._pivmin()
        q = d[0] - sigmas
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count = (q < 0.0).astype(np.int64)
        for i in range(1, self.n):
            q = (d[i] - sigmas) - e2[i - 1] / q
            q = np.where(np.abs(q) < pivmin, -pivmin, q)
            count += q < 0.0
        return count

    def gershgorin(self):
        radius = np.zeros(self.n)
        radius[:-1] += np.abs(self.offdiag)
        radius[1:] += np.abs(self.offdiag)
        return float(np.min(self.diag - radius)), float(np.max(self.diag + radius))

    def eigenvalues_lowest(self, k: int, tol: Optional[float] = None) -> np.ndarray:
        if not 1 <= k <= self.n:
            raise ValueError("k must be between 1 and the matrix size")
        if not (np.all(np.isfinite(self.diag)) and np.all(np.isfinite(self.offdiag))):
            raise ValueError(
                "bisection cannot converge: matrix has non-finite entries")
        lo, hi = self.gershgorin()
        scale = max(abs(lo), abs(hi), 1.0)
        if tol is None:
            tol = 1e-12 * scale
        pad = 2.0 * _EPS * scale
        los = np.full(k, lo - pad)
        his = np.full(k, hi + pad)
        targets = np.arange(1, k + 1)
        for _ in range(220):
            if np.all(his - los <= tol):
                break
            mids = 0.5 * (los + his)
            counts = self._count_below_vec(mids)
            go_left = counts >= targets
            his = np.where(go_left, mids, his)
            los = np.where(go_left, los, mids)
        return 0.5 * (los + his)

    def eigenvector(self, lam: float, prev: Sequence[np.ndarray] = (),
                    seed: int = 0, iters: int = 2) -> np.ndarray:
        """Inverse iteration at shift lam, orthogonalized against prev."""
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(self.n)
        v /= np.linalg.norm(v)
        fact = _factor_shifted(self.diag, self.offdiag, lam)
        for _ in range(max(iters, 1)):
            v = _solve_factored(fact, v)
            for p in prev:
                v = v - (p @ v) * p
            nrm = np.linalg.norm(v)
            if not np.isfinite(nrm) or nrm == 0.0:
                v = rng.standard_normal(self.n)
                nrm = np.linalg.norm(v)
            v = v / nrm
        return v


def _factor_shifted(diag, off, shift):
    """LU factorization of (T - shift I) with partial pivoting and fill-in."""
    dd = (np.asarray(diag, dtype=float) - shift).tolist()
    dl = np.asarray(off, dtype=float).tolist()
    du = list(dl)
    n = len(dd)
    du2 = [0.0] * max(n - 2, 0)
    piv = [0] * max(n - 1, 0)
    scale = max(max(abs(x) for x in dd), max((abs(x) for x in dl), default=0.0), 1.0)
    guard = _EPS * scale
    for i in range(n - 1):
        if abs(dd[i]) >= abs(dl[i]):
            if abs(dd[i]) < guard:
                dd[i] = guard if dd[i] >= 0.0 else -guard
            fact = dl[i] / dd[i]
            dl[i] = fact
            dd[i + 1] -= fact * du[i]
        else:
            piv[i] = 1
            fact = dd[i] / dl[i]
            dd[i] = dl[i]
            dl[i] = fact
            tmp = dd[i + 1]
            dd[i + 1] = du[i] - fact * tmp
            du[i] = tmp
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
    if abs(dd[n - 1]) < guard:
        dd[n - 1] = guard if dd[n - 1] >= 0.0 else -guard
    return dd, dl, du, du2, piv


def _solve_factored(fact, b):
    dd, dl, du, du2, piv = fact
    n = len(dd)
    x = np.asarray(b, dtype=float).tolist()
    for i in range(n - 1):
        if piv[i]:
            tmp = x[i]
            x[i] = x[i + 1]
            x[i + 1] = tmp - dl[i] * x[i]
        else:
            x[i + 1] -= dl[i] * x[i]
    x[n - 1] /= dd[n - 1]
    if n >= 2:
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / dd[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dd[i]
    return np.asarray(x)


# ---------------------------------------------------------------------------
# Hamiltonian discretization

def _dirichlet_matrix(V_interior, h: float) -> TridiagonalSym:
    """Three-point -d2/dx2 + V over interior nodes with Dirichlet walls."""
    V = np.asarray(V_interior, dtype=float)
    inv_h2 = 1.0 / (h * h)
    diag = 2.0 * inv_h2 + V
    off = np.full(max(V.size - 1, 0), -inv_h2)
    return TridiagonalSym(diag=diag, offdiag=off)


def _potential_samples(V, xs: np.ndarray) -> np.ndarray:
    Vv = np.asarray(V(xs) if callable(V) else V, dtype=float)
    if Vv.shape != xs.shape:
        raise ValueError("potential samples must match the grid")
    return Vv


def hamiltonian_matrix(V: Union[Callable, Sequence, np.ndarray],
                       grid: Grid) -> TridiagonalSym:
    """Dirichlet discretization of -d2/dx2 + V acting on the grid interior.

    V may be a callable evaluated on the nodes or an array of samples over the
    full grid (endpoints included). The endpoints themselves never enter the
    matrix, so a potential that blows up exactly at the walls is fine; one
    that is non-finite at an interior node is rejected.
    """
    xs = grid.x
    Vv = _potential_samples(V, xs)
    interior = Vv[1:-1]
    bad = ~np.isfinite(interior)
    if np.any(bad):
        raise PoleError("potential is not finite at interior grid points",
                        locations=[float(v) for v in xs[1:-1][bad][:8]])
    return _dirichlet_matrix(interior, grid.h)


def eigen_lowest(mat: TridiagonalSym, kmax: int, h: float = 1.0, seed: int = 0):
    """Lowest kmax eigenpairs, ascending, as a list of (value, vector).

    Vectors come from two rounds of inverse iteration, orthogonalized against
    the earlier ones, normalized so h * sum(v^2) = 1, and sign-fixed so the
    first significant lobe is positive.
    """
    evals = mat.eigenvalues_lowest(kmax)
    out = []
    done = []
    scale = 1.0 / math.sqrt(h)
    for j in range(kmax):
        v = mat.eigenvector(evals[j], prev=done, seed=seed + j)
        done.append(v)
        out.append((float(evals[j]), fix_sign(v) * scale))
    return out


def fix_sign(values) -> np.ndarray:
    """Flip the overall sign so the first significant lobe is positive."""
    v = np.asarray(values, dtype=float)
    peak = float(np.max(np.abs(v)))
    if peak == 0.0:
        return v
    idx = np.nonzero(np.abs(v) > 1e-6 * peak)[0]
    if idx.size and v[idx[0]] < 0.0:
        return -v
    return v


def apply_hamiltonian(psi_values, V_values, h: float) -> np.ndarray:
    """(-d2/dx2 + V) psi with the five-point second-derivative stencil."""
    psi = np.asarray(psi_values, dtype=float)
    V = np.asarray(V_values, dtype=float)
    if psi.shape != V.shape:
        raise ValueError("psi and V must share the grid")
    return -derivative(psi, h, order=2) + V * psi


def _superpotential_samples(W, xs: np.ndarray, m) -> np.ndarray:
    if hasattr(W, "evaluate"):
        return np.asarray(W.evaluate(xs, m), dtype=float)
    if callable(W):
        return np.asarray(W(xs, m), dtype=float)
    return np.asarray(W, dtype=float)


def adjointness_defect(W, m, phi: GridFunction, psi: GridFunction,
                       boundary_tol: float = 1e-8) -> float:
    """|<phi, (-d/dx + W) psi> - <psi, (d/dx + W) phi>| on a shared grid.

    The two first-order operators are mutually adjoint only when phi*psi dies
    off at the window ends, so that hypothesis is checked first and its
    failure is reported as a boundary-condition error rather than a defect.
    """
    if phi.grid != psi.grid:
        raise ValueError("phi and psi must share the grid")
    grid = phi.grid
    u = phi.values
    v = psi.values
    prod = u * v
    scale = max(float(np.max(np.abs(prod))), np.finfo(float).tiny)
    edge = max(abs(prod[0]), abs(prod[-1]))
    if edge > boundary_tol * scale:
        raise BoundaryConditionError(
            "phi*psi does not vanish at the window ends "
            f"(edge/peak = {edge / scale:.3e})")
    Wv = _superpotential_samples(W, grid.x, m)
    if Wv.shape != u.shape:
        raise ValueError("superpotential samples must match the grid")
    raising = -derivative(v, grid.h) + Wv * v
    lowering = derivative(u, grid.h) + Wv * u
    return abs(inner_product(u, raising, grid.h)
               - inner_product(v, lowering, grid.h))


# ---------------------------------------------------------------------------
# full numeric spectrum

@dataclass(frozen=True)
class NumericSpectrum:
    """Eigenpairs of a discretized Hamiltonian; iterates as (k, E, vector)."""

    grid: Grid
    energies: np.ndarray
    wavefunctions: np.ndarray  # shape (grid.n, k), normalized, sign fixed
    error_estimate: Optional[np.ndarray]  # Richardson estimate per level

    def __len__(self) -> int:
        return int(self.energies.size)

    def __getitem__(self, k):
        return int(k), float(self.energies[k]), self.wavefunctions[:, k]

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]


def spectrum_numeric(V: Union[Callable, Sequence, np.ndarray], grid: Grid,
                     kmax: int, richardson: bool = True,
                     seed: int = 0) -> NumericSpectrum:
    """Lowest kmax Dirichlet eigenpairs of -d2/dx2 + V on the grid.

    Wavefunctions carry the boundary zeros and are normalized so that
    h * sum(psi^2) = 1. A half-resolution re-run provides a Richardson error
    estimate per energy whenever the coarse potential is recoverable (callable
    V, or sampled V on an odd node count).
    """
    xs = grid.x
    Vv = _potential_samples(V, xs)
    if not (1 <= kmax <= grid.n - 2):
        raise ValueError("kmax out of range for this grid")
    T = hamiltonian_matrix(Vv, grid)
    pairs = eigen_lowest(T, kmax, h=grid.h, seed=seed)
    evals = np.array([e for e, _ in pairs])
    psi = np.zeros((grid.n, kmax))
    for j, (_, vec) in enumerate(pairs):
        psi[1:-1, j] = vec

    err = None
    if richardson:
        coarse = _coarse_samples(V, Vv, grid)
        if coarse is not None:
            V2, n2 = coarse
            h2 = (grid.x1 - grid.x0) / (n2 - 1)
            kk = min(kmax, n2 - 2)
            if kk >= 1:
                e2 = _dirichlet_matrix(V2[1:-1], h2).eigenvalues_lowest(kk)
                r = (grid.n - 1) / (n2 - 1)
                err = np.full(kmax, np.nan)
                err[:kk] = np.abs(evals[:kk] - e2) / (r * r - 1.0)
    return NumericSpectrum(grid=grid, energies=evals,
                           wavefunctions=psi, error_estimate=err)


def _coarse_samples(V, Vv, grid: Grid):
    n2 = grid.n // 2 + 1
    if n2 < 4:
        return None
    if callable(V):
        x2 = np.linspace(grid.x0, grid.x1, n2)
        return _potential_samples(V, x2), n2
    if grid.n % 2 == 1:
        return Vv[::2], n2
    return None
