"""Analytic model of two tunneling doublets under a strong periodic drive.

States are labeled 1..4 (lower doublet 1,2; upper doublet 3,4) but stored
0-based in arrays. Time arguments accept scalars or 1-d arrays; array input
yields a leading time axis on the result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import bessel_j, bessel_j_orders, j1_over_x

DEFAULT_ORDER = 40
SMALL_RABI_ARG = 1e-4


@dataclass(frozen=True)
class BareParams:
    """Energies, signed field couplings and drive frequency of the driven
    four-level Hamiltonian.

    Energies may carry any common offset; the analytic model only uses the
    splittings and the doublet separation, which amounts to putting the zero
    of energy at the center of the lower doublet.
    """

    e1: float
    e2: float
    e3: float
    e4: float
    rabi_12: float
    rabi_34: float
    rabi_14: float
    rabi_23: float
    omega: float

    def __post_init__(self):
        vals = [getattr(self, f) for f in self.__dataclass_fields__]
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("all parameters must be finite")
        if self.omega <= 0:
            raise ValueError("drive frequency must be positive")
        if self.e2 < self.e1 or self.e4 < self.e3:
            raise ValueError("doublet levels must be ordered (e2 >= e1, e4 >= e3)")
        if self.doublet_gap <= 0:
            raise ValueError("upper doublet must lie above the lower one")

    @property
    def lower_splitting(self) -> float:
        return self.e2 - self.e1

    @property
    def upper_splitting(self) -> float:
        return self.e4 - self.e3

    @property
    def doublet_gap(self) -> float:
        return 0.5 * (self.e3 + self.e4) - 0.5 * (self.e1 + self.e2)

    @property
    def energies(self) -> np.ndarray:
        return np.array([self.e1, self.e2, self.e3, self.e4])

    def coupling_matrix(self) -> np.ndarray:
        """Real symmetric matrix multiplying ``-cos(omega t)`` in the lab frame."""
        c = np.zeros((4, 4))
        c[0, 1] = c[1, 0] = self.rabi_12
        c[2, 3] = c[3, 2] = self.rabi_34
        c[0, 3] = c[3, 0] = self.rabi_14
        c[1, 2] = c[2, 1] = self.rabi_23
        return c


@dataclass(frozen=True)
class RenormalizedParams:
    lower_splitting: float
    upper_splitting: float
    rabi_14: float
    rabi_23: float
    doublet_gap: float
    omega: float

    @property
    def energies(self) -> np.ndarray:
        """Renormalized energies with the lower doublet centered at zero."""
        return np.array(
            [
                -0.5 * self.lower_splitting,
                0.5 * self.lower_splitting,
                self.doublet_gap - 0.5 * self.upper_splitting,
                self.doublet_gap + 0.5 * self.upper_splitting,
            ]
        )

    @property
    def detuning_14(self) -> float:
        e = self.energies
        return e[3] - e[0] - self.omega

    @property
    def detuning_23(self) -> float:
        e = self.energies
        return e[2] - e[1] - self.omega

    @property
    def generalized_rabi_14(self) -> float:
        return math.hypot(self.rabi_14, self.detuning_14)

    @property
    def generalized_rabi_23(self) -> float:
        return math.hypot(self.rabi_23, self.detuning_23)

    def rabi_period(self) -> float:
        """Period of the 1'<->4' population oscillation (``inf`` without coupling)."""
        w = self.generalized_rabi_14
        return 2.0 * math.pi / w if w > 0 else math.inf


@dataclass(frozen=True)
class RegimeReport:
    lower_splitting_ratio: float
    upper_splitting_ratio: float
    rabi_14_ratio: float
    rabi_23_ratio: float
    detuning_ratio: float
    threshold: float
    within_validity: bool

    def ratios(self) -> dict[str, float]:
        return {
            "lower_splitting/omega": self.lower_splitting_ratio,
            "upper_splitting/omega": self.upper_splitting_ratio,
            "|rabi_14|/omega": self.rabi_14_ratio,
            "|rabi_23|/omega": self.rabi_23_ratio,
            "|gap-omega|/omega": self.detuning_ratio,
        }


@dataclass(frozen=True)
class OscillatingTerm:
    """Bessel arguments of the oscillating remainder, with precomputed
    ``J_0..J_order`` for each of them."""

    zeta_lower: float
    zeta_upper: float
    order: int = DEFAULT_ORDER
    _tables: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("truncation order must be at least 1")
        tables = {
            name: bessel_j_orders(self.order, z)
            for name, z in (
                ("lower", self.zeta_lower),
                ("upper", self.zeta_upper),
                ("plus", self.zeta_plus),
                ("minus", self.zeta_minus),
            )
        }
        object.__setattr__(self, "_tables", tables)

    @property
    def zeta_plus(self) -> float:
        return 0.5 * (self.zeta_lower + self.zeta_upper)

    @property
    def zeta_minus(self) -> float:
        return 0.5 * (self.zeta_lower - self.zeta_upper)

    def table(self, name: str) -> np.ndarray:
        return self._tables[name]


def oscillating_term(p: BareParams, order: int = DEFAULT_ORDER) -> OscillatingTerm:
    return OscillatingTerm(2.0 * p.rabi_12 / p.omega, 2.0 * p.rabi_34 / p.omega, order)


# --------------------------------------------------------------------------


def phases(p: BareParams, t):
    """Intra-doublet phases ``(phi', phi'', phi+, phi-)`` at time ``t``."""
    s = np.sin(p.omega * np.asarray(t, dtype=float))
    lower = (p.rabi_12 / p.omega) * s
    upper = (p.rabi_34 / p.omega) * s
    return lower, upper, lower + upper, lower - upper


def renormalize(p: BareParams) -> RenormalizedParams:
    """Field-dressed splittings and inter-doublet Rabi frequencies."""
    w = p.omega
    x_minus = (p.rabi_12 - p.rabi_34) / w
    x_plus = (p.rabi_12 + p.rabi_34) / w
    sym = (p.rabi_14 + p.rabi_23) * j1_over_x(x_minus)
    anti = (p.rabi_14 - p.rabi_23) * j1_over_x(x_plus)
    return RenormalizedParams(
        lower_splitting=p.lower_splitting * bessel_j(0, 2.0 * p.rabi_12 / w),
        upper_splitting=p.upper_splitting * bessel_j(0, 2.0 * p.rabi_34 / w),
        rabi_14=sym + anti,
        rabi_23=sym - anti,
        doublet_gap=p.doublet_gap,
        omega=w,
    )


def rwa_params(p: BareParams) -> RenormalizedParams:
    """Bare parameters in renormalized form: the weak-field RWA model."""
    return RenormalizedParams(
        p.lower_splitting, p.upper_splitting, p.rabi_14, p.rabi_23, p.doublet_gap, p.omega
    )


def validate_regime(p: BareParams, threshold: float = 0.1) -> RegimeReport:
    """Size of the small parameters controlling the neglected oscillating terms."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    w = p.omega
    ratios = (
        p.lower_splitting / w,
        p.upper_splitting / w,
        abs(p.rabi_14) / w,
        abs(p.rabi_23) / w,
        abs(p.doublet_gap - w) / w,
    )
    return RegimeReport(*ratios, threshold=threshold, within_validity=all(r <= threshold for r in ratios))


def _sin_over(wbar: float, t: np.ndarray) -> np.ndarray:
    # sin(wbar t / 2) / wbar, continuous through wbar -> 0
    arg = wbar * t
    out = np.empty_like(t)
    small = np.abs(arg) < SMALL_RABI_ARG
    out[small] = 0.5 * t[small] * (1.0 - (0.5 * arg[small]) ** 2 / 6.0)
    big = ~small
    out[big] = np.sin(0.5 * arg[big]) / wbar
    return out


def analytic_amplitudes(r: RenormalizedParams, c0, t):
    """Rotating-frame amplitudes under the time-independent dressed Hamiltonian.

    The (1,4) and (2,3) pairs evolve as independent detuned Rabi problems.
    """
    c0 = np.asarray(c0, dtype=complex)
    if c0.shape != (4,):
        raise ValueError("initial state must have four amplitudes")
    if abs(np.vdot(c0, c0).real - 1.0) > 1e-10:
        raise ValueError("initial state must be normalized")
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    e = r.energies
    w = r.omega
    out = np.empty((t.size, 4), dtype=complex)

    def pair(lo, hi, rabi, det, wbar):
        cos = np.cos(0.5 * wbar * t)
        sin = _sin_over(wbar, t)
        a = (c0[lo] * cos + 1j * (c0[lo] * det + c0[hi] * rabi) * sin) * np.exp(
            -1j * (0.5 * det + e[lo]) * t
        )
        b = (c0[hi] * cos - 1j * (c0[hi] * det - c0[lo] * rabi) * sin) * np.exp(
            1j * (0.5 * det - e[hi] + w) * t
        )
        out[:, lo] = a
        out[:, hi] = b

    pair(0, 3, r.rabi_14, r.detuning_14, r.generalized_rabi_14)
    pair(1, 2, r.rabi_23, r.detuning_23, r.generalized_rabi_23)
    return out[0] if scalar else out


def renormalized_basis(p: BareParams, t) -> np.ndarray:
    """Field-dressed basis states in the bare basis.

    Returns a 4x4 complex matrix whose column ``i`` is ``|i'(t)>`` (the
    common phase from the lower-doublet energy is dropped).
    """
    lower, upper, _, _ = phases(p, float(t))
    cl, sl = math.cos(lower), math.sin(lower)
    cu, su = math.cos(upper), math.sin(upper)
    carrier = np.exp(-1j * p.omega * float(t))
    b = np.zeros((4, 4), dtype=complex)
    b[0, 0], b[1, 0] = cl, 1j * sl
    b[0, 1], b[1, 1] = 1j * sl, cl
    b[2, 2], b[3, 2] = carrier * cu, carrier * 1j * su
    b[2, 3], b[3, 3] = carrier * 1j * su, carrier * cu
    return b


def to_bare(p: BareParams, amplitudes, t):
    """Map rotating-frame amplitudes to the bare basis (``sum_i c_i' |i'(t)>``)."""
    amps = np.asarray(amplitudes, dtype=complex)
    t_arr = np.asarray(t, dtype=float)
    lower, upper, _, _ = phases(p, t_arr)
    cl, sl = np.cos(lower), np.sin(lower)
    cu, su = np.cos(upper), np.sin(upper)
    carrier = np.exp(-1j * p.omega * t_arr)
    out = np.empty_like(amps)
    out[..., 0] = cl * amps[..., 0] + 1j * sl * amps[..., 1]
    out[..., 1] = 1j * sl * amps[..., 0] + cl * amps[..., 1]
    out[..., 2] = carrier * (cu * amps[..., 2] + 1j * su * amps[..., 3])
    out[..., 3] = carrier * (1j * su * amps[..., 2] + cu * amps[..., 3])
    return out


def compose_solution(p: BareParams, r: RenormalizedParams, c0, t):
    """Bare-basis state predicted by the dressed model at time ``t``."""
    return to_bare(p, analytic_amplitudes(r, c0, t), t)


def project_renormalized(p: BareParams, psi, t) -> np.ndarray:
    """Populations ``|<i'(t)|psi>|^2`` of the four dressed states."""
    psi = np.asarray(psi, dtype=complex)
    lower, upper, _, _ = phases(p, np.asarray(t, dtype=float))
    cl, sl = np.cos(lower), np.sin(lower)
    cu, su = np.cos(upper), np.sin(upper)
    # overall e^{i omega t} on the upper pair drops out of populations
    amps = np.stack(
        [
            cl * psi[..., 0] - 1j * sl * psi[..., 1],
            -1j * sl * psi[..., 0] + cl * psi[..., 1],
            cu * psi[..., 2] - 1j * su * psi[..., 3],
            -1j * su * psi[..., 2] + cu * psi[..., 3],
        ],
        axis=-1,
    )
    return np.abs(amps) ** 2


# --------------------------------------------------------------------------
# Hamiltonians


def lab_hamiltonian(p: BareParams, t: float) -> np.ndarray:
    """Lab-frame Hamiltonian (real symmetric) at time ``t``."""
    return np.diag(p.energies) - math.cos(p.omega * t) * p.coupling_matrix()


def h0_matrix(r: RenormalizedParams) -> np.ndarray:
    """Constant part of the rotated Hamiltonian."""
    h = np.diag(r.energies - np.array([0.0, 0.0, r.omega, r.omega]))
    h[0, 3] = h[3, 0] = -0.5 * r.rabi_14
    h[1, 2] = h[2, 1] = -0.5 * r.rabi_23
    return h


def _inter_doublet(p: BareParams, cos_minus, sin_minus, cos_plus, sin_plus) -> np.ndarray:
    # -(O14+O23)/2 [cm (s23+s14) - i sm (s13+s24) + h.c.]
    # -(O23-O14)/2 [cp (s23-s14) - i sp (s13-s24) + h.c.]
    k = np.zeros((4, 4), dtype=complex)
    a = -0.5 * (p.rabi_14 + p.rabi_23)
    b = -0.5 * (p.rabi_23 - p.rabi_14)
    k[1, 2] += a * cos_minus + b * cos_plus
    k[0, 3] += a * cos_minus - b * cos_plus
    k[0, 2] += -1j * (a * sin_minus + b * sin_plus)
    k[1, 3] += -1j * (a * sin_minus - b * sin_plus)
    return k + k.conj().T


def rotated_hamiltonian(p: BareParams, t: float) -> np.ndarray:
    """Exact Hamiltonian in the frame that removes the intra-doublet drive."""
    t = float(t)
    lower, upper, plus, minus = (float(v) for v in phases(p, t))
    h = np.zeros((4, 4), dtype=complex)
    d1, d2 = 0.5 * p.lower_splitting, 0.5 * p.upper_splitting
    h[0, 0], h[1, 1] = -d1 * math.cos(2 * lower), d1 * math.cos(2 * lower)
    h[1, 0], h[0, 1] = 1j * d1 * math.sin(2 * lower), -1j * d1 * math.sin(2 * lower)
    h[2, 2], h[3, 3] = -d2 * math.cos(2 * upper), d2 * math.cos(2 * upper)
    h[3, 2], h[2, 3] = 1j * d2 * math.sin(2 * upper), -1j * d2 * math.sin(2 * upper)
    h[2, 2] += p.doublet_gap - p.omega
    h[3, 3] += p.doublet_gap - p.omega
    envelope = math.cos(p.omega * t) * np.exp(-1j * p.omega * t)
    h += _inter_doublet(
        p,
        envelope * math.cos(minus),
        envelope * math.sin(minus),
        envelope * math.cos(plus),
        envelope * math.sin(plus),
    )
    return h


def _chi(j: np.ndarray, wt: float) -> tuple[complex, complex]:
    n_max = j.size - 1
    rot = np.exp(-2j * wt)
    chi_c = 0.5 * rot * (j[0] + rot * (j[2] if n_max >= 2 else 0.0))
    for k in range(2, n_max + 1, 2):
        chi_c += (1.0 + (rot if k != 2 else 0.0)) * j[k] * math.cos(k * wt)
    odd = sum(j[k] * math.sin(k * wt) for k in range(1, n_max + 1, 2))
    return chi_c, (1.0 + rot) * odd


def h1_matrix(o: OscillatingTerm, p: BareParams, t: float) -> np.ndarray:
    """Oscillating part of the rotated Hamiltonian, Bessel sums truncated at
    order ``o.order``."""
    wt = p.omega * float(t)
    n_max = o.order
    h = np.zeros((4, 4), dtype=complex)
    for j, split, lo, hi in (
        (o.table("lower"), p.lower_splitting, 0, 1),
        (o.table("upper"), p.upper_splitting, 2, 3),
    ):
        even = sum(j[k] * math.cos(k * wt) for k in range(2, n_max + 1, 2))
        odd = sum(j[k] * math.sin(k * wt) for k in range(1, n_max + 1, 2))
        h[hi, hi] += split * even
        h[lo, lo] -= split * even
        h[hi, lo] += 1j * split * odd
        h[lo, hi] -= 1j * split * odd
    cm, sm = _chi(o.table("minus"), wt)
    cp, sp = _chi(o.table("plus"), wt)
    return h + _inter_doublet(p, cm, sm, cp, sp)
