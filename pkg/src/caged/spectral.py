"""Eigenvalue engines for glued trees.

Two routes to every spectrum: a dense Hermitian solve of the full weighted
adjacency matrix (the brute-force oracle), and block assembly from small
symmetric tridiagonal matrices, which covers the fluxless tree and the tree
at flux 2*pi/x_1.  The tridiagonal matrices are solved by Sturm-sequence
bisection, so a depth-d tree's spectrum costs polynomial work in d even
though the matrix itself has roughly x^d rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import gauge, graphs
from .errors import InvalidParameterError, UnsupportedHypothesisError

DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalues with multiplicities; values strictly increasing."""

    eigenvalues: tuple[tuple[float, int], ...]

    @property
    def dimension(self) -> int:
        return sum(m for (_v, m) in self.eigenvalues)

    @property
    def distinct(self) -> int:
        return len(self.eigenvalues)

    def expand(self) -> np.ndarray:
        """The full multiset as a sorted array."""
        return np.array([v for (v, m) in self.eigenvalues for _ in range(m)])

    def multiplicity_at(self, value: float, tol: float = DEGENERACY_TOL) -> int:
        return sum(m for (v, m) in self.eigenvalues if abs(v - value) <= tol)


def cluster_eigenvalues(values: Sequence[float], counts: Sequence[int] | None = None,
                        tol: float = DEGENERACY_TOL) -> Spectrum:
    """Merge a weighted eigenvalue list into a Spectrum.

    Values closer than ``tol`` are one level; the level's value is the
    weighted mean of its members.
    """
    if counts is None:
        counts = [1] * len(values)
    pairs = sorted(zip(values, counts))
    merged: list[tuple[float, int]] = []
    acc_val, acc_cnt = None, 0
    for v, c in pairs:
        if acc_val is None or v - acc_val / acc_cnt > tol:
            if acc_val is not None:
                merged.append((acc_val / acc_cnt, acc_cnt))
            acc_val, acc_cnt = v * c, c
        else:
            acc_val += v * c
            acc_cnt += c
    if acc_val is not None:
        merged.append((acc_val / acc_cnt, acc_cnt))
    return Spectrum(eigenvalues=tuple(merged))


# ---------------------------------------------------------------------------
# Dense Hermitian oracle
# ---------------------------------------------------------------------------


def hermitian_eigensolve(m: np.ndarray, *, cluster_tol: float = DEGENERACY_TOL,
                         hermiticity_tol: float = 1e-10) -> tuple[Spectrum, np.ndarray]:
    """Eigen-decomposition of a dense Hermitian matrix.

    Returns the clustered Spectrum and the eigenvector matrix (columns ordered
    by ascending eigenvalue).  Rejects visibly non-Hermitian input.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidParameterError("matrix must be square")
    if m.size and np.max(np.abs(m - m.conj().T)) > hermiticity_tol:
        raise InvalidParameterError("matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(m)
    return cluster_eigenvalues(vals.tolist(), tol=cluster_tol), vecs


def ccam_spectrum(m: gauge.Ccam, *, cluster_tol: float = DEGENERACY_TOL) -> Spectrum:
    spec, _vecs = hermitian_eigensolve(gauge.dense_matrix(m), cluster_tol=cluster_tol)
    return spec


# ---------------------------------------------------------------------------
# Symmetric tridiagonal eigenvalues by Sturm bisection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tridiag:
    diagonal: tuple[float, ...]
    offdiagonal: tuple[float, ...]

    def __post_init__(self):
        if len(self.offdiagonal) != max(len(self.diagonal) - 1, 0):
            raise InvalidParameterError("offdiagonal length must be n - 1")

    def dense(self) -> np.ndarray:
        n = len(self.diagonal)
        out = np.diag(np.asarray(self.diagonal, dtype=float))
        for i, b in enumerate(self.offdiagonal):
            out[i, i + 1] = out[i + 1, i] = b
        return out


def _sturm_counts(diag: np.ndarray, off2: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each shift in ``xs``.

    Counts negative pivots of the LDL^T factorization of T - x, the standard
    Sturm sequence; zero pivots are nudged to keep the recurrence finite.
    """
    n = len(diag)
    counts = np.zeros(len(xs), dtype=int)
    d = np.full(len(xs), 1.0)
    # pivot floor keeps off2/prev finite without disturbing counts
    pivmin = math.sqrt(np.finfo(float).tiny) * max(1.0, float(off2.max(initial=0.0)))
    for k in range(n):
        prev = np.where(np.abs(d) < pivmin, np.where(d < 0, -pivmin, pivmin), d)
        d = (diag[k] - xs) - (off2[k - 1] / prev if k > 0 else 0.0)
        counts += d < 0
    return counts


def tridiagonal_eigenvalues(t: Tridiag) -> np.ndarray:
    """All eigenvalues of a real symmetric tridiagonal matrix, ascending.

    Bisection on the Sturm count converges to machine-precision brackets for
    every index simultaneously; no similarity transforms, so the matrix is
    never modified.
    """
    n = len(t.diagonal)
    if n == 0:
        return np.array([])
    diag = np.asarray(t.diagonal, dtype=float)
    off = np.asarray(t.offdiagonal, dtype=float)
    off2 = off * off
    radius = np.zeros(n)
    radius[:-1] += np.abs(off) if n > 1 else 0.0
    radius[1:] += np.abs(off) if n > 1 else 0.0
    lo_all = float(np.min(diag - radius))
    hi_all = float(np.max(diag + radius))
    span = max(hi_all - lo_all, 1.0)
    lo = np.full(n, lo_all - 1e-3 * span)
    hi = np.full(n, hi_all + 1e-3 * span)
    targets = np.arange(1, n + 1)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        counts = _sturm_counts(diag, off2, mid)
        below = counts >= targets
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
        if np.max(hi - lo) < 1e-15 * span:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Continuants and closed forms
# ---------------------------------------------------------------------------


def continuant_eval(x: Sequence[int], lam: complex, n: int):
    """Evaluate gamma_n at ``lam`` for gamma_i = -lam*gamma_{i-1} - x_{floor(i/2)}*gamma_{i-2}.

    gamma_0 = 1 and gamma_{-1} = 0; the weights x are 1-based, so gamma_{2j}
    and gamma_{2j+1} both consume x_j.  These are the characteristic
    polynomials of the tridiagonal blocks below, interleaved.
    """
    if n < -1:
        raise InvalidParameterError("index must be >= -1")
    xs = graphs.check_growth_sequence(x, allow_trailing_one=True)
    if n > 2 * len(xs) + 1:
        raise InvalidParameterError(f"index {n} needs more than {len(xs)} weights")
    prev, cur = 0.0, 1.0  # gamma_{-1}, gamma_0
    for i in range(1, n + 1):
        w = xs[i // 2 - 1] if i >= 2 else 0.0
        prev, cur = cur, -lam * cur - w * prev
    return cur if n >= 0 else 0.0


def pnary_closed_form(p: int, n: int) -> np.ndarray:
    """Eigenvalues 2*sqrt(p)*cos(pi*x/(n+1)), x = 1..n, ascending."""
    if p < 1 or n < 1:
        raise InvalidParameterError("p and n must be positive")
    vals = 2.0 * math.sqrt(p) * np.cos(np.pi * np.arange(1, n + 1) / (n + 1))
    return np.sort(vals)


# ---------------------------------------------------------------------------
# Spectrum assembly for glued trees
# ---------------------------------------------------------------------------


def _require_all_at_least_two(xs: tuple[int, ...], what: str):
    if any(v < 2 for v in xs):
        raise UnsupportedHypothesisError(
            f"{what} requires every growth entry >= 2 (got {xs}); "
            "use the dense oracle instead")


def fluxless_block(x: Sequence[int], i: int) -> Tridiag:
    """Block i of the fluxless tree: zero diagonal, off-diagonal weights
    (sqrt(x_i), ..., sqrt(x_1), sqrt(x_1), ..., sqrt(x_i)), size 2i + 1.

    The weights are square roots of the branching numbers even though the
    raw symmetrized couplings bundle x_i parallel edges; the dense oracle and
    the shell basis both fix this normalization.
    """
    xs = graphs.check_growth_sequence(x, allow_trailing_one=True)
    if not (0 <= i <= len(xs)):
        raise InvalidParameterError(f"block index {i} out of range")
    half = [math.sqrt(v) for v in xs[:i][::-1]]
    return Tridiag(diagonal=(0.0,) * (2 * i + 1), offdiagonal=tuple(half + half[::-1]))


def fluxless_multiplicities(x: Sequence[int]) -> list[tuple[int, int]]:
    """(block index, multiplicity) pairs for the fluxless assembly.

    Block d appears once; block i < d appears (x_{i+1} - 1) * prod_{j>i+1} x_j
    times.  The dimensions sum to the tree's vertex count.
    """
    xs = graphs.check_growth_sequence(x)
    d = len(xs)
    out = [(d, 1)]
    for i in range(d - 1, -1, -1):
        mult = xs[i] - 1
        for v in xs[i + 1:]:
            mult *= v
        out.append((i, mult))
    return out


def spectrum_fluxless(x: Sequence[int]) -> Spectrum:
    """Spectrum of the unweighted glued tree, assembled from tridiagonal blocks."""
    xs = graphs.check_growth_sequence(x)
    _require_all_at_least_two(xs, "fluxless assembly")
    values: list[float] = []
    counts: list[int] = []
    for (i, mult) in fluxless_multiplicities(xs):
        for v in tridiagonal_eigenvalues(fluxless_block(xs, i)):
            values.append(float(v))
            counts.append(mult)
    spec = cluster_eigenvalues(values, counts)
    if spec.dimension != graphs.tree_vertex_count(xs):
        raise AssertionError("fluxless assembly lost eigenvalues")
    return spec


def flux_af_block(x: Sequence[int], i: int) -> Tridiag:
    """Open path block for the tree at flux 2*pi/x_1: size i + 1 with
    off-diagonal weights (sqrt(x_1), ..., sqrt(x_i))."""
    xs = graphs.check_growth_sequence(x, allow_trailing_one=True)
    if not (0 <= i <= len(xs)):
        raise InvalidParameterError(f"block index {i} out of range")
    return Tridiag(diagonal=(0.0,) * (i + 1),
                   offdiagonal=tuple(math.sqrt(v) for v in xs[:i]))


def flux_af_multiplicities(x: Sequence[int]) -> list[tuple[int, int]]:
    """(block index, multiplicity) pairs at flux 2*pi/x_1.

    Everything except the zero block is doubled; with Q_i = prod_{j=2..i} x_j,
    block d appears twice, block i-1 appears 2 * (x_i - 1) * Q_d / Q_i for
    i = 2..d, and the 1x1 zero block appears (x_1 - 2) * Q_d times.
    """
    xs = graphs.check_growth_sequence(x)
    d = len(xs)
    q = [1] * (d + 1)
    for i in range(2, d + 1):
        q[i] = q[i - 1] * xs[i - 1]
    out = [(d, 2)]
    for i in range(2, d + 1):
        out.append((i - 1, 2 * (xs[i - 1] - 1) * (q[d] // q[i])))
    zero_mult = (xs[0] - 2) * q[d]
    if zero_mult:
        out.append((0, zero_mult))
    return out


def spectrum_flux_af(x: Sequence[int]) -> Spectrum:
    """Spectrum of the canonically gauged tree at flux 2*pi/x_1."""
    xs = graphs.check_growth_sequence(x)
    _require_all_at_least_two(xs, "flux assembly")
    values: list[float] = []
    counts: list[int] = []
    for (i, mult) in flux_af_multiplicities(xs):
        for v in tridiagonal_eigenvalues(flux_af_block(xs, i)):
            values.append(float(v))
            counts.append(mult)
    spec = cluster_eigenvalues(values, counts)
    if spec.dimension != graphs.tree_vertex_count(xs):
        raise AssertionError("flux assembly lost eigenvalues")
    return spec


# ---------------------------------------------------------------------------
# Distance-shell reduction (fluxless only)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShellReduction:
    tridiag: Tridiag
    shell_sizes: tuple[int, ...]
    closure_residual: float


def distance_shell_reduction(x: Sequence[int], phi: float = 0.0) -> ShellReduction:
    """Collapse the fluxless tree onto uniform-amplitude distance shells.

    Shell i holds the vertices at distance i from the first root; the
    adjacency acts as a (2d+1)-dimensional tridiagonal matrix with weights
    (sqrt(x_d), ..., sqrt(x_1), sqrt(x_1), ..., sqrt(x_d)) going outward
    (the first root fans into x_d subtrees).  Only the zero-flux matrix
    closes on these shells; interference breaks the permutation symmetry
    otherwise.
    """
    if phi != 0.0:
        raise UnsupportedHypothesisError("shell reduction applies at zero flux only")
    xs = graphs.check_growth_sequence(x)
    _require_all_at_least_two(xs, "shell reduction")
    d = len(xs)
    g = graphs.grow_tree(xs)
    dist = g.distances_from(g.first_vertex)
    sizes = [0] * (2 * d + 1)
    for dd in dist:
        sizes[dd] += 1
    tri = fluxless_block(xs, d)

    # closure check: A acting on each normalized shell vector
    adj = g.adjacency()
    shells = [np.zeros(g.num_vertices) for _ in range(2 * d + 1)]
    for v, dd in enumerate(dist):
        shells[dd][v] = 1.0
    for s in shells:
        s /= np.linalg.norm(s)
    resid = 0.0
    off = tri.offdiagonal
    for i, s in enumerate(shells):
        image = np.zeros(g.num_vertices)
        for v in range(g.num_vertices):
            if s[v]:
                for w in adj[v]:
                    image[w] += s[v]
        expect = np.zeros(g.num_vertices)
        if i > 0:
            expect += off[i - 1] * shells[i - 1]
        if i < 2 * d:
            expect += off[i] * shells[i + 1]
        resid = max(resid, float(np.max(np.abs(image - expect))))
    return ShellReduction(tridiag=tri, shell_sizes=tuple(sizes), closure_residual=resid)
