"""Numerical kernels: Bessel functions of the first kind, a cyclic Jacobi
eigensolver for real symmetric matrices, and fixed-step RK4 integrators for
complex linear systems.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, NumericalError

SERIES_LIMIT = 12.0


def _check_finite(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"Bessel argument must be finite, got {x!r}")
    return x


def _series(n: int, x: float) -> float:
    half = 0.5 * x
    q = -half * half
    term = 1.0
    for k in range(1, n + 1):
        term *= half / k
    if term == 0.0:
        return 0.0
    terms = [term]
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + n))
        terms.append(term)
        if k > abs(half) and abs(term) <= 1e-18 * abs(terms[0]):
            break
    return math.fsum(terms)


def _miller(nmax: int, x: float) -> np.ndarray:
    """J_0..J_nmax for x > 0 by normalized downward recurrence."""
    top = max(nmax, x)
    m = int(top + 30 + 3.0 * math.sqrt(top))
    m += m % 2
    out = np.zeros(nmax + 1)
    j_next, j = 0.0, 1e-300
    norm = 0.0
    for k in range(m, 0, -1):
        j_prev = (2.0 * k / x) * j - j_next
        j_next, j = j, j_prev
        # j is now J_{k-1} (unnormalized)
        if abs(j) > 1e250:
            j *= 1e-250
            j_next *= 1e-250
            out *= 1e-250
            norm *= 1e-250
        if k - 1 <= nmax:
            out[k - 1] = j
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j
    norm += j
    return out / norm


def bessel_j_orders(nmax: int, x: float) -> np.ndarray:
    """Return ``[J_0(x), ..., J_nmax(x)]``.

    Uses the ascending series for ``|x| <= 12`` and Miller's downward
    recurrence normalized by ``J_0 + 2 sum J_2k = 1`` otherwise. Negative
    arguments use ``J_n(-x) = (-1)^n J_n(x)``.
    """
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    x = _check_finite(x)
    ax = abs(x)
    if ax == 0.0:
        out = np.zeros(nmax + 1)
        out[0] = 1.0
        return out
    if ax <= SERIES_LIMIT:
        out = np.array([_series(n, ax) for n in range(nmax + 1)])
    else:
        out = _miller(nmax, ax)
    if x < 0:
        out[1::2] = -out[1::2]
    return out


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind ``J_n(x)`` for integer ``n >= 0``."""
    if n < 0 or int(n) != n:
        raise ValueError(f"order must be a nonnegative integer, got {n!r}")
    x = _check_finite(x)
    if abs(x) <= SERIES_LIMIT:
        v = _series(int(n), abs(x)) if x != 0.0 else float(n == 0)
        return -v if (x < 0 and n % 2) else v
    return float(bessel_j_orders(int(n), x)[int(n)])


def j1_over_x(x: float) -> float:
    """``J_1(x)/x`` with the removable point at zero handled by its Taylor series."""
    if abs(x) < 1e-6:
        x2 = x * x
        return 0.5 - x2 / 16.0 + x2 * x2 / 384.0
    return bessel_j(1, x) / x


# --------------------------------------------------------------------------
# Jacobi eigensolver


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int


def symmetric_matrix(a) -> np.ndarray:
    """Validate a square finite real matrix and return its symmetric part."""
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a nonempty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return 0.5 * (a + a.T)


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # Tournament schedule: every pair appears exactly once per sweep and the
    # pairs within a round are disjoint, so a round can be applied at once.
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        p, q = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a >= 0 and b >= 0:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=int), np.array(q, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(a, tol: float = 1e-12, max_sweeps: int = 100) -> EigenDecomposition:
    """Diagonalize a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius norm drops below
    ``tol * ||A||_F``. Eigenvalues are returned ascending; ties keep input
    order.

    Raises
    ------
    ConvergenceError
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    a = symmetric_matrix(a)
    n = a.shape[0]
    if n > 2048:
        raise ValueError("matrix dimension above 2048")
    v = np.eye(n)
    scale = np.linalg.norm(a)
    rounds = _round_robin(n) if n > 1 else []

    offdiag = ~np.eye(n, dtype=bool)

    def off_norm(m):
        return float(np.linalg.norm(m[offdiag]))

    sweeps = 0
    off = off_norm(a)
    while off > tol * scale:
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {off:.3e})",
                residual=off,
            )
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            with np.errstate(over="ignore", divide="ignore"):
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t[tau == 0.0] = 1.0
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * ap - s * aq
            a[:, q] = s * ap + c * aq
            ap, aq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * ap - s[:, None] * aq
            a[q, :] = s[:, None] * ap + c[:, None] * aq
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq
        sweeps += 1
        off = off_norm(a)

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], v[:, order], sweeps)


def jacobi_eigvalsh(a, **kwargs) -> np.ndarray:
    return jacobi_eigh(a, **kwargs).eigenvalues


# --------------------------------------------------------------------------
# Runge-Kutta


def rk4_propagate(
    deriv: Callable[[float, np.ndarray], np.ndarray],
    initial,
    t0: float,
    t1: float,
    dt: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate ``dc/dt = deriv(t, c)`` with classical fixed-step RK4.

    Returns ``(times, states)`` with one sample per step, including the
    initial state. The last step is shortened so that ``times[-1] == t1``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    c = np.array(initial, dtype=complex)
    n_full = int(math.floor((t1 - t0) / dt * (1.0 + 1e-12)))
    times = [t0 + k * dt for k in range(n_full + 1)]
    if t1 - times[-1] > 1e-12 * max(1.0, abs(t1)):
        times.append(t1)
    else:
        times[-1] = t1
    times = np.array(times)
    states = np.empty((len(times),) + c.shape, dtype=complex)
    states[0] = c
    for k in range(len(times) - 1):
        t, h = times[k], times[k + 1] - times[k]
        k1 = deriv(t, c)
        k2 = deriv(t + 0.5 * h, c + 0.5 * h * k1)
        k3 = deriv(t + 0.5 * h, c + 0.5 * h * k2)
        k4 = deriv(t + h, c + h * k3)
        c = c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(c)):
            raise NumericalError(f"non-finite amplitude at t={times[k + 1]!r}", time=times[k + 1])
        states[k + 1] = c
    return times, states


def rk4_step_matrices(generator: Callable[[np.ndarray], np.ndarray], starts, h: float) -> np.ndarray:
    """One-step RK4 propagators for a linear system ``dc/dt = A(t) c``.

    ``generator`` maps an array of times of shape ``(k,)`` to the stack of
    matrices ``A(t)`` of shape ``(k, n, n)``. Returns ``S`` with
    ``c(t + h) = S @ c(t)`` under one classical RK4 step started at each
    entry of ``starts``; this is the same map ``rk4_propagate`` applies.
    """
    starts = np.asarray(starts, dtype=float)
    a1 = generator(starts)
    a2 = generator(starts + 0.5 * h)
    a3 = generator(starts + h)
    eye = np.eye(a1.shape[-1])
    k1 = a1
    k2 = a2 @ (eye + 0.5 * h * k1)
    k3 = a2 @ (eye + 0.5 * h * k2)
    k4 = a3 @ (eye + h * k3)
    return eye + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
