"""Quartic double well in a truncated harmonic-oscillator basis.

The static Hamiltonian is ``p^2/2 - x^2/4 + x^4/(64 D)``; ``D`` is roughly
the number of tunneling doublets below the barrier top. Levels are
1-indexed in every public interface.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ConvergenceError, GaugeError
from .four_level import BareParams
from .numerics import jacobi_eigh, jacobi_eigvalsh, symmetric_matrix

DEFAULT_LEVEL_MAP = (1, 2, 5, 6)
SEARCH_INTERVAL = (0.05, 5.0)


@dataclass(frozen=True)
class QuarticConfig:
    D: float
    basis_size: int = 80
    basis_frequency: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.D) and self.D > 0):
            raise ValueError("D must be positive")
        if self.basis_size < 8:
            raise ValueError("basis_size must be at least 8")
        if not self.basis_frequency > 0:
            raise ValueError("basis_frequency must be positive")

    def with_frequency(self, w: float) -> "QuarticConfig":
        return QuarticConfig(self.D, self.basis_size, w)


@dataclass(frozen=True)
class Spectrum:
    energies: np.ndarray
    dipole: np.ndarray
    parities: np.ndarray
    basis_coefficients: np.ndarray
    basis_frequency: float

    @property
    def n_levels(self) -> int:
        return self.energies.size

    def energy(self, level: int) -> float:
        return float(self.energies[level - 1])

    def x(self, i: int, j: int) -> float:
        """Dipole element between 1-indexed levels ``i`` and ``j``."""
        return float(self.dipole[i - 1, j - 1])


@dataclass(frozen=True)
class FourLevelExtract:
    level_map: tuple[int, int, int, int]
    params: BareParams
    field: float
    omega: float

    def coupling_ratios(self) -> float:
        """Smallest intra-doublet over largest inter-doublet coupling magnitude."""
        p = self.params
        inter = max(abs(p.rabi_14), abs(p.rabi_23))
        intra = min(abs(p.rabi_12), abs(p.rabi_34))
        return intra / inter if inter > 0 else math.inf


def ho_operators(M: int, w: float):
    """Position and momentum operators in the first ``M`` oscillator states of
    frequency ``w`` (unit mass).

    Returns ``(x, x2, x4, p2)``. Powers of ``x`` are formed from an
    ``(M + 4)``-state matrix before truncation so the last rows are exact.
    """
    if M < 8:
        raise ValueError("M must be at least 8")
    big = M + 4
    up = np.sqrt(np.arange(1, big))
    lower = np.diag(up, 1)
    x = (lower + lower.T) / math.sqrt(2.0 * w)
    x2 = x @ x
    x4 = x2 @ x2
    n = np.arange(M)
    a2 = (lower @ lower)[:M, :M]
    p2 = np.diag(0.5 * w * (2 * n + 1)) - 0.5 * w * (a2 + a2.T)
    return x[:M, :M].copy(), x2[:M, :M].copy(), x4[:M, :M].copy(), p2


def build_hamiltonian(cfg: QuarticConfig) -> np.ndarray:
    _, x2, x4, p2 = ho_operators(cfg.basis_size, cfg.basis_frequency)
    return symmetric_matrix(0.5 * p2 - 0.25 * x2 + x4 / (64.0 * cfg.D))


def optimize_basis_frequency(
    cfg: QuarticConfig,
    n_keep: int = 12,
    builder: Callable[[QuarticConfig], np.ndarray] = build_hamiltonian,
    tol: float = 1e-4,
) -> tuple[float, float]:
    """Golden-section search for the basis frequency minimizing the sum of the
    lowest ``n_keep`` eigenvalues.

    Returns ``(frequency, eigenvalue_sum)``. Raises ``ConvergenceError`` if
    the minimum sits on the edge of the search interval.
    """
    if n_keep < 1 or n_keep > cfg.basis_size / 3:
        raise ValueError("n_keep must lie in [1, basis_size/3]")

    def objective(w):
        return float(np.sum(jacobi_eigvalsh(builder(cfg.with_frequency(w)))[:n_keep]))

    lo, hi = SEARCH_INTERVAL
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = objective(c), objective(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = objective(d)
    w, f = (c, fc) if fc <= fd else (d, fd)
    if w - lo < 2 * tol or hi - w < 2 * tol:
        raise ConvergenceError(f"basis frequency search hit the interval edge at {w:.4g}", residual=w)
    return w, f


def ho_wavefunctions(M: int, w: float, x) -> np.ndarray:
    """Oscillator eigenfunctions ``phi_0..phi_{M-1}`` sampled at ``x``; shape
    ``(M, len(x))``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((M,) + x.shape)
    out[0] = (w / math.pi) ** 0.25 * np.exp(-0.5 * w * x * x)
    if M > 1:
        out[1] = math.sqrt(2.0 * w) * x * out[0]
    for n in range(2, M):
        out[n] = math.sqrt(2.0 * w / n) * x * out[n - 1] - math.sqrt((n - 1) / n) * out[n - 2]
    return out


def _fix_gauge(vectors: np.ndarray, w: float, gauge: str) -> np.ndarray:
    out = vectors.copy()
    if gauge == "coefficient":
        anchors = [out[int(np.argmax(np.abs(out[:, k]))), k] for k in range(out.shape[1])]
    elif gauge == "position":
        # Sign of the wavefunction on its outermost x > 0 lobe: unlike basis
        # coefficients this does not depend on the basis frequency.
        M = out.shape[0]
        grid = np.linspace(0.0, math.sqrt(2.0 * M / w), 4 * M + 1)[1:]
        psi = out.T @ ho_wavefunctions(M, w, grid)
        anchors = []
        for row in psi:
            peak = np.max(np.abs(row))
            if peak < 1e-12:
                anchors.append(0.0)
                continue
            idx = np.nonzero(np.abs(row) >= 0.5 * peak)[0][-1]
            anchors.append(row[idx])
    else:
        raise ValueError(f"unknown gauge {gauge!r}")
    for k, a in enumerate(anchors):
        if abs(a) < 1e-12:
            raise GaugeError(f"state {k + 1}: anchor below 1e-12, sign cannot be fixed")
        if a < 0:
            out[:, k] = -out[:, k]
    return out


def solve_spectrum(cfg: QuarticConfig, n_levels: int = 20, gauge: str = "position") -> Spectrum:
    """Lowest ``n_levels`` eigenstates, their parities and dipole matrix.

    ``gauge`` fixes eigenvector signs: ``"position"`` makes each wavefunction
    positive on its outermost lobe at ``x > 0``; ``"coefficient"`` makes the
    largest harmonic coefficient positive.
    """
    if n_levels < 1 or n_levels > cfg.basis_size - 10:
        raise ValueError("n_levels must lie in [1, basis_size - 10]")
    x, _, _, _ = ho_operators(cfg.basis_size, cfg.basis_frequency)
    dec = jacobi_eigh(build_hamiltonian(cfg))
    vecs = _fix_gauge(dec.eigenvectors[:, :n_levels], cfg.basis_frequency, gauge)
    dipole = vecs.T @ x @ vecs
    dipole = 0.5 * (dipole + dipole.T)
    even_weight = np.sum(vecs[0::2] ** 2, axis=0)
    odd_weight = np.sum(vecs[1::2] ** 2, axis=0)
    parities = np.where(even_weight >= odd_weight, 1, -1)
    return Spectrum(
        energies=dec.eigenvalues[:n_levels].copy(),
        dipole=dipole,
        parities=parities,
        basis_coefficients=vecs.T.copy(),
        basis_frequency=cfg.basis_frequency,
    )


def extract_four_level(
    s: Spectrum, ratio: float, level_map: tuple[int, int, int, int] = DEFAULT_LEVEL_MAP
) -> FourLevelExtract:
    """Effective four-level parameters with the drive tuned to ``E6 - E1`` and
    the field set so that ``|rabi_12| / omega == ratio``."""
    if s.n_levels < max(level_map):
        raise ValueError(f"spectrum needs at least {max(level_map)} levels")
    if ratio < 0:
        raise ValueError("ratio must be nonnegative")
    a, b, c, d = level_map
    x12 = s.x(a, b)
    if abs(x12) < 1e-12:
        raise GaugeError("intra-doublet dipole of the lower doublet vanishes")
    omega = s.energy(d) - s.energy(a)
    lam = ratio * omega / abs(x12)
    params = BareParams(
        s.energy(a),
        s.energy(b),
        s.energy(c),
        s.energy(d),
        rabi_12=lam * x12,
        rabi_34=lam * s.x(c, d),
        rabi_14=lam * s.x(a, d),
        rabi_23=lam * s.x(b, c),
        omega=omega,
    )
    return FourLevelExtract(tuple(level_map), params, lam, omega)


def write_spectrum_csv(s: Spectrum, energies_path, dipole_path) -> None:
    with Path(energies_path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "energy", "parity"])
        for i, (e, par) in enumerate(zip(s.energies, s.parities), start=1):
            w.writerow([i, f"{e:.12g}", int(par)])
    with Path(dipole_path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index"] + [f"x{j}" for j in range(1, s.n_levels + 1)])
        for i, row in enumerate(s.dipole, start=1):
            w.writerow([i] + [f"{v:.12g}" for v in row])
