"""Momentum-space models for glued-tree chains and the {4,4} star lattice.

The chain model keeps one copy of the tree per unit cell, identifying the
last root of each cell with the first root of the next; the Bloch matrix is
the tree matrix with the last root folded back onto the first through a
momentum phase.  The momentum origin is chosen so that the single-rhombus
chain reproduces the textbook closed form E(k) = +-sqrt(2)*sqrt(2 + cos k +
cos(k - phi)) pointwise in k (the recursive gauge by itself parametrizes the
same bands with k displaced by phi/2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import gauge, graphs
from .errors import InvalidParameterError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BlochModel:
    """A momentum- and flux-parametric family of finite Hermitian matrices."""

    bands: int
    dimensionality: int
    default_flux: float
    builder: Callable[..., np.ndarray]

    def matrix(self, k, phi: float | None = None) -> np.ndarray:
        phi = self.default_flux if phi is None else phi
        if self.dimensionality == 1:
            kk = k[0] if isinstance(k, (tuple, list, np.ndarray)) else k
            return self.builder(kk, phi)
        if isinstance(k, (int, float)):
            raise InvalidParameterError("two momentum components required")
        return self.builder(k[0], k[1], phi)


def chain_bloch(x: Sequence[int], phi: float) -> BlochModel:
    """Bloch matrix family of the infinite root-to-root chain of glued trees.

    One unit cell holds the tree minus its last root, so the band count is
    the tree vertex count minus one.  The couplings into the last root wrap
    to the next cell's first root with the momentum phase.
    """
    xs = graphs.check_growth_sequence(x)
    d = len(xs)
    xd = xs[-1]

    @lru_cache(maxsize=32)
    def _sub(phi_val: float):
        if d == 1:
            return np.zeros((1, 1), dtype=complex), 0, 0
        sub = gauge.canonical_ccam(xs[:-1], phi_val, _allow_trailing_one=True)
        return gauge.dense_matrix(sub), sub.first_vertex, sub.last_vertex

    sub_dim = 1 if d == 1 else graphs.tree_vertex_count(xs[:-1])
    dim = 1 + xd * sub_dim

    def builder(k: float, phi_val: float) -> np.ndarray:
        y_sub, f_idx, l_idx = _sub(phi_val)
        k_eff = k - 0.5 * phi_val  # align the zone origin with the closed form
        out = np.zeros((dim, dim), dtype=complex)
        wrap = cmath.exp(1j * k_eff)
        for j in range(xd):
            base = 1 + j * sub_dim
            out[base:base + sub_dim, base:base + sub_dim] = y_sub
            w = cmath.exp(1j * gauge.branch_angle(xs, d, j + 1, phi_val))
            out[0, base + f_idx] += w
            out[0, base + l_idx] += wrap * w.conjugate()
        out[1:, 0] = np.conj(out[0, 1:])
        return out

    return BlochModel(bands=dim, dimensionality=1, default_flux=phi, builder=builder)


def rhombic_bands(phi: float, k: float) -> tuple[float, float, float]:
    """Closed-form bands of the single-rhombus chain: 0 and +-sqrt(2)*sqrt(2
    + cos k + cos(k - phi))."""
    val = 2.0 + math.cos(k) + math.cos(k - phi)
    e = math.sqrt(2.0) * math.sqrt(max(val, 0.0))
    return (-e, 0.0, e)


def second_kind_44_bloch(phi: float) -> BlochModel:
    """Six-band model of the {4,4} star lattice of 2-shrubs.

    Site order: corner, rim, center, rim, rim, rim.  The phased edge weight
    omega appears on two edges of every rhombic face, so each face winds
    2*arg(omega); omega = exp(i*phi/2) therefore threads the flux phi through
    every face, which the real-space patch check pins down: the bands all
    flatten exactly at the 2-shrub caging point phi = pi.
    """

    def builder(kx: float, ky: float, phi_val: float) -> np.ndarray:
        w = cmath.exp(0.5j * phi_val)
        wc = w.conjugate()
        ex = cmath.exp(1j * kx)
        ey = cmath.exp(1j * ky)
        exy = ex * ey
        out = np.zeros((6, 6), dtype=complex)
        out[0, 1] = 1.0 / ex + w
        out[0, 3] = 1.0 / exy + wc / ex
        out[0, 4] = 1.0 + wc / ey
        out[0, 5] = 1.0 / ey + w / exy
        out[1, 2] = w
        out[2, 3] = 1.0
        out[2, 4] = 1.0
        out[2, 5] = wc
        for i in range(6):
            for j in range(i + 1, 6):
                out[j, i] = out[i, j].conjugate()
        return out

    return BlochModel(bands=6, dimensionality=2, default_flux=phi, builder=builder)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BandSweep:
    momenta: tuple[tuple[float, ...], ...]
    energies: np.ndarray  # (num points, bands), ascending per row
    total_bandwidth: float


def momentum_grid(dimensionality: int, grid: int) -> tuple[tuple[float, ...], ...]:
    if grid < 2:
        raise InvalidParameterError("grid needs at least 2 points per direction")
    line = [TWO_PI * i / grid for i in range(grid)]
    if dimensionality == 1:
        return tuple((k,) for k in line)
    return tuple((kx, ky) for kx in line for ky in line)


def band_sweep(model: BlochModel, phi: float | None, grid: int) -> BandSweep:
    """Diagonalize on a uniform momentum grid over [0, 2*pi) per direction."""
    pts = momentum_grid(model.dimensionality, grid)
    energies = np.empty((len(pts), model.bands))
    for i, k in enumerate(pts):
        energies[i] = np.linalg.eigvalsh(model.matrix(k, phi))
    width = float(np.max(energies.max(axis=0) - energies.min(axis=0)))
    return BandSweep(momenta=pts, energies=energies, total_bandwidth=width)


@dataclass(frozen=True)
class DosMap:
    flux_values: tuple[float, ...]
    bin_edges: np.ndarray
    counts: np.ndarray  # (num fluxes, num bins)

    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    def occupied_bins(self, flux_index: int) -> np.ndarray:
        return np.nonzero(self.counts[flux_index] > 0)[0]


def dos_map(model: BlochModel, phi_grid: Sequence[float], k_grid: int,
            energy_bins: int) -> DosMap:
    """Histogram of eigenvalues per flux over a momentum grid.

    Bin edges are shared across fluxes (computed from the global energy
    range) so columns are comparable.
    """
    if len(phi_grid) == 0 or energy_bins < 1:
        raise InvalidParameterError("need at least one flux and one bin")
    sweeps = [band_sweep(model, phi, k_grid) for phi in phi_grid]
    lo = min(float(s.energies.min()) for s in sweeps)
    hi = max(float(s.energies.max()) for s in sweeps)
    pad = 1e-9 * max(1.0, abs(hi - lo))
    edges = np.linspace(lo - pad, hi + pad, energy_bins + 1)
    counts = np.empty((len(phi_grid), energy_bins), dtype=int)
    for i, s in enumerate(sweeps):
        counts[i], _ = np.histogram(s.energies.ravel(), bins=edges)
    return DosMap(flux_values=tuple(float(p) for p in phi_grid), bin_edges=edges,
                  counts=counts)


def charpoly_k_independence(x: Sequence[int], phi: float, lam_samples: Sequence[float],
                            k_count: int = 8) -> float:
    """Worst-case momentum variation of det(F(k) - lam) over sample shifts.

    Zero (to roundoff) exactly when the bands carry no dispersion, which for
    the chain happens at the flat flux values.
    """
    if len(lam_samples) == 0:
        raise InvalidParameterError("need at least one sample shift")
    model = chain_bloch(x, phi)
    ks = [TWO_PI * i / k_count for i in range(k_count)]
    worst = 0.0
    eye = np.eye(model.bands)
    for lam in lam_samples:
        dets = [complex(np.linalg.det(model.matrix(k, phi) - lam * eye)) for k in ks]
        for i in range(len(dets)):
            for j in range(i + 1, len(dets)):
                worst = max(worst, abs(dets[i] - dets[j]))
    return worst
