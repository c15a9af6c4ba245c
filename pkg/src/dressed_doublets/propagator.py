"""Time-dependent Schrodinger propagation of the driven double well in its
truncated eigenbasis, plus population bookkeeping in the bare and dressed
bases.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .four_level import (
    BareParams,
    RenormalizedParams,
    analytic_amplitudes,
    project_renormalized,
    to_bare,
)
from .numerics import rk4_step_matrices
from .quartic import DEFAULT_LEVEL_MAP, Spectrum

NORM_ABORT = 1e-6


@dataclass(frozen=True)
class DriveConfig:
    """Drive ``-field * x * cos(omega t)`` and integration settings.

    ``initial_state`` is indexed by propagated level; ``None`` means the
    ground state.
    """

    field: float
    omega: float
    t_end: float
    steps_per_period: int = 2048
    n_levels: int = 20
    initial_state: np.ndarray | None = None

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if self.steps_per_period < 64:
            raise ValueError("steps_per_period must be at least 64")
        if self.n_levels < 4:
            raise ValueError("n_levels must be at least 4")
        if self.initial_state is not None:
            c = np.asarray(self.initial_state, dtype=complex)
            if c.shape != (self.n_levels,):
                raise ValueError(f"initial_state must have {self.n_levels} amplitudes")
            if abs(np.vdot(c, c).real - 1.0) > 1e-10:
                raise ValueError("initial_state must be normalized")
            object.__setattr__(self, "initial_state", c)

    @property
    def dt(self) -> float:
        return 2.0 * math.pi / self.omega / self.steps_per_period

    def start(self) -> np.ndarray:
        if self.initial_state is not None:
            return self.initial_state.copy()
        c = np.zeros(self.n_levels, dtype=complex)
        c[0] = 1.0
        return c


@dataclass(frozen=True)
class PopulationSeries:
    """Populations on a time grid.

    ``bare`` holds the four model levels (columns in level-map order),
    ``renorm`` the four dressed states; ``leakage`` is the population outside
    the model subspace.
    """

    times: np.ndarray
    bare: np.ndarray
    renorm: np.ndarray
    norm: np.ndarray
    leakage: np.ndarray
    levels: tuple[int, ...] = DEFAULT_LEVEL_MAP

    def __len__(self):
        return self.times.size

    @property
    def norm_drift(self) -> float:
        return float(np.max(np.abs(self.norm - self.norm[0])))


@dataclass(frozen=True)
class SeriesComparison:
    max_bare: np.ndarray
    max_renorm: np.ndarray
    rms_bare: float
    rms_renorm: float
    rabi_period_a: float
    rabi_period_b: float

    @property
    def max_renorm_overall(self) -> float:
        return float(np.max(self.max_renorm))

    @property
    def max_bare_overall(self) -> float:
        return float(np.max(self.max_bare))


def _time_grid(t_end: float, dt: float) -> tuple[int, float]:
    n_full = int(math.floor(t_end / dt * (1.0 + 1e-12)))
    rest = t_end - n_full * dt
    if rest <= 1e-12 * t_end:
        rest = 0.0
    return n_full, rest


def _integrate(h_static, coupling, field, omega, t_end, steps_per_period, c0, on_chunk):
    """RK4 for ``i dc/dt = (h_static - field cos(omega t) coupling) c``.

    The grid has exactly ``steps_per_period`` steps per drive period, so the
    one-step propagators repeat every period. They are built once, chained
    into cumulative products over a period, and each period is then a
    single batched product. ``on_chunk(times, states)`` receives consecutive
    blocks of samples.
    """
    n = h_static.shape[0]
    dt = 2.0 * math.pi / omega / steps_per_period
    a_static = -1j * h_static
    a_drive = 1j * field * coupling

    def generator(ts):
        return a_static[None] + np.cos(omega * ts)[:, None, None] * a_drive[None]

    steps = rk4_step_matrices(generator, dt * np.arange(steps_per_period), dt)
    cumulative = np.empty((steps_per_period + 1, n, n), dtype=complex)
    cumulative[0] = np.eye(n)
    for k in range(steps_per_period):
        cumulative[k + 1] = steps[k] @ cumulative[k]

    n_full, rest = _time_grid(t_end, dt)
    c = np.asarray(c0, dtype=complex)
    done = 0
    while done <= n_full:
        take = min(steps_per_period, n_full - done + 1)
        block = cumulative[:take] @ c
        idx = done + np.arange(take)
        times = idx * dt
        if not np.all(np.isfinite(block)):
            bad = int(np.argmax(~np.all(np.isfinite(block), axis=1)))
            raise NumericalError(f"non-finite amplitude at t={times[bad]!r}", time=float(times[bad]))
        on_chunk(times, block)
        c = cumulative[steps_per_period] @ c
        done += take
    if rest > 0.0:
        last = rk4_step_matrices(generator, np.array([n_full * dt]), rest)[0] @ block[-1]
        if not np.all(np.isfinite(last)):
            raise NumericalError(f"non-finite amplitude at t={t_end!r}", time=t_end)
        on_chunk(np.array([t_end]), last[None])


class _Collector:
    def __init__(self, model_idx, phase_params, norm0):
        self.model_idx = list(model_idx)
        self.phase_params = phase_params
        self.norm0 = norm0
        self.parts = []

    def __call__(self, times, states):
        pops = np.abs(states) ** 2
        norm = pops.sum(axis=1)
        drift = np.abs(norm - self.norm0)
        if np.any(drift > NORM_ABORT):
            k = int(np.argmax(drift > NORM_ABORT))
            raise NumericalError(
                f"norm drift {drift[k]:.2e} exceeds {NORM_ABORT:g} at t={times[k]:.6g}; "
                "increase steps_per_period",
                time=float(times[k]),
            )
        sub = states[:, self.model_idx]
        bare = pops[:, self.model_idx]
        renorm = project_renormalized(self.phase_params, sub, times)
        self.parts.append((times, bare, renorm, norm, norm - bare.sum(axis=1)))

    def series(self, levels) -> PopulationSeries:
        cols = [np.concatenate(c) for c in zip(*self.parts)]
        return PopulationSeries(*cols, levels=tuple(levels))


def model_params(s: Spectrum, field: float, omega: float, level_map=DEFAULT_LEVEL_MAP) -> BareParams:
    """Four-level parameters of the spectrum levels in ``level_map``."""
    a, b, c, d = level_map
    return BareParams(
        s.energy(a),
        s.energy(b),
        s.energy(c),
        s.energy(d),
        rabi_12=field * s.x(a, b),
        rabi_34=field * s.x(c, d),
        rabi_14=field * s.x(a, d),
        rabi_23=field * s.x(b, c),
        omega=omega,
    )


def propagate(s: Spectrum, d: DriveConfig, level_map=DEFAULT_LEVEL_MAP) -> PopulationSeries:
    """Integrate the driven double well over the lowest ``d.n_levels`` states.

    Energies are measured from the mean of the model levels; this only adds
    a global phase and keeps the RK4 norm loss small.

    Raises
    ------
    NumericalError
        If the norm drifts by more than 1e-6 or an amplitude becomes non-finite.
    """
    if d.n_levels > s.n_levels:
        raise ValueError(f"spectrum has {s.n_levels} levels, drive asks for {d.n_levels}")
    if max(level_map) > d.n_levels:
        raise ValueError("model levels must be among the propagated levels")
    L = d.n_levels
    energies = s.energies[:L]
    idx = [k - 1 for k in level_map]
    h_static = np.diag(energies - energies[idx].mean())
    coupling = s.dipole[:L, :L]
    phase_params = model_params(s, d.field, d.omega, level_map)
    c0 = d.start()
    collect = _Collector(idx, phase_params, float(np.vdot(c0, c0).real))
    _integrate(h_static, coupling, d.field, d.omega, d.t_end, d.steps_per_period, c0, collect)
    return collect.series(level_map)


def propagate_four_level(p: BareParams, d: DriveConfig) -> PopulationSeries:
    """The same integrator applied to the four-level lab-frame Hamiltonian."""
    if d.n_levels != 4:
        raise ValueError("four-level propagation needs n_levels == 4")
    # the drive field is already folded into the couplings of p
    h_static = np.diag(p.energies - p.energies.mean())
    c0 = d.start()
    collect = _Collector(range(4), p, float(np.vdot(c0, c0).real))
    _integrate(h_static, p.coupling_matrix(), 1.0, p.omega, d.t_end, d.steps_per_period, c0, collect)
    return collect.series((1, 2, 3, 4))


def analytic_series(p: BareParams, r: RenormalizedParams, c0, times) -> PopulationSeries:
    """Populations predicted by the dressed four-level model on ``times``."""
    times = np.asarray(times, dtype=float)
    rot = analytic_amplitudes(r, c0, times)
    bare = np.abs(to_bare(p, rot, times)) ** 2
    norm = bare.sum(axis=1)
    return PopulationSeries(times, bare, np.abs(rot) ** 2, norm, np.zeros_like(norm), (1, 2, 3, 4))


def rabi_period_estimate(times, p1) -> float:
    """Period of a Rabi oscillation that starts at its maximum, from the
    first dip of ``p1``.

    The dip is the stretch where ``p1`` sits below the midpoint of its range;
    its discrete minimum is refined by a parabola through the neighbours.
    Returns ``nan`` if no dip is found.
    """
    times = np.asarray(times, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    lo, hi = p1.min(), p1.max()
    if hi - lo < 1e-6:
        return math.nan
    below = p1 < 0.5 * (lo + hi)
    if not below.any():
        return math.nan
    start = int(np.argmax(below))
    after = np.nonzero(~below[start:])[0]
    stop = start + int(after[0]) if after.size else p1.size
    k = start + int(np.argmin(p1[start:stop]))
    t_min = times[k]
    if 0 < k < p1.size - 1:
        y0, y1, y2 = p1[k - 1], p1[k], p1[k + 1]
        denom = y0 - 2.0 * y1 + y2
        if denom > 0:
            h = times[k + 1] - times[k]
            t_min = times[k] + 0.5 * h * (y0 - y2) / denom
    return 2.0 * t_min


def compare_series(a: PopulationSeries, b: PopulationSeries) -> SeriesComparison:
    """Pointwise deviations between two runs on the same time grid."""
    if a.times.shape != b.times.shape or np.max(np.abs(a.times - b.times), initial=0.0) > 1e-9 * max(
        1.0, float(np.max(np.abs(a.times), initial=0.0))
    ):
        raise ValueError("series have different time grids")
    db = np.abs(a.bare - b.bare)
    dr = np.abs(a.renorm - b.renorm)
    return SeriesComparison(
        max_bare=db.max(axis=0),
        max_renorm=dr.max(axis=0),
        rms_bare=float(np.sqrt(np.mean(db**2))),
        rms_renorm=float(np.sqrt(np.mean(dr**2))),
        rabi_period_a=rabi_period_estimate(a.times, a.renorm[:, 0]),
        rabi_period_b=rabi_period_estimate(b.times, b.renorm[:, 0]),
    )
