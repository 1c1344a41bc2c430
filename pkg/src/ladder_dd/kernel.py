"""Filter functions and coherence decay under an Ohmic dephasing bath.

A pulsed run splits [0, T] into n*N free-evolution segments.  In the frame
toggled by the cyclic pulse group, a bath mode of frequency w coupled to
ladder transition k picks up, per segment, the window amplitude

    kernel(w, dt) = (1 - exp(i w dt)) / w

weighted by the start-time phase exp(i w t_start) and by the level occupied
in the toggled frame.  Summing over all N cycles at fixed intra-cycle slot l
gives the position filter eta_l(w); the decay exponent of the (0,1) coherence
collects, per transition, the second difference of cyclically adjacent
position filters,

    chi(w) = eta_{l-1}(w) - 2 eta_l(w) + eta_{l+1}(w)   (indices mod n),

one such combination per exponent index m = 1..n-1.  For a continuum Ohmic
bath with spectral density I(w) = (alpha/4) w exp(-w/w_c) at temperature Tp
(units hbar = k_B = 1) the exponents are

    Gamma_m = 1/2 * integral_0^{w_c} I(w) coth(w/(2 Tp)) |chi_m(w)|^2 dw,

and the surviving coherence fraction is P(T) = exp(-sum_m Gamma_m).  The
integrand is finite at w = 0: I(w) coth(w/(2 Tp)) -> alpha*Tp/2 while the
filters approach -i times segment-length sums.

Integration runs composite Gauss-Legendre panels over [0, w_c], doubling the
panel count until every exponent settles to the requested relative error.
All reductions use fixed numpy summation order, so results are bit-identical
regardless of surrounding thread counts.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .schedules import PulseSchedule, Scheme, ScheduleSpec, build_schedule

GL_ORDER = 15
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)

# Cap on elements per exp() batch inside the filter evaluation (memory bound).
_CHUNK_ELEMS = 2**21


class ConvergenceError(RuntimeError):
    """Quadrature refinement exhausted without meeting the error target."""

    def __init__(self, message: str, previous: np.ndarray, current: np.ndarray):
        super().__init__(message)
        self.previous = np.asarray(previous)
        self.current = np.asarray(current)


@dataclass(frozen=True)
class BathSpec:
    """Ohmic bath: coupling strength, cutoff and temperature (hbar = k_B = 1).

    ``r`` is the spectral exponent and is fixed at 1; it is stored so a bath
    specification is self-describing.
    """

    alpha: float
    cutoff: float
    temperature: float
    r: int = 1

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not self.cutoff > 0:
            raise ValueError(f"cutoff must be > 0, got {self.cutoff}")
        if not self.temperature > 0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")
        if self.r != 1:
            raise ValueError(f"only the Ohmic exponent r=1 is supported, got {self.r}")


def ohmic_density(omega, bath: BathSpec):
    """Spectral density (alpha/4) * w * exp(-w/cutoff); accepts arrays."""
    omega = np.asarray(omega, dtype=float)
    result = (bath.alpha / 4.0) * omega * np.exp(-omega / bath.cutoff)
    return result if result.ndim else float(result)


def segment_kernel(omega, dt: float):
    """Window amplitude (1 - exp(i*w*dt))/w of one free segment; -i*dt at w=0."""
    if dt < 0:
        raise ValueError(f"segment duration must be >= 0, got dt={dt}")
    omega = np.asarray(omega, dtype=float)
    scalar = omega.ndim == 0
    omega = np.atleast_1d(omega)
    out = np.empty(omega.shape, dtype=complex)
    zero = omega == 0.0
    nz = ~zero
    out[nz] = (1.0 - np.exp(1j * omega[nz] * dt)) / omega[nz]
    out[zero] = -1j * dt
    return complex(out[0]) if scalar else out


def transition_for_exponent(n: int, m: int) -> int:
    """Ladder transition (0-based) whose bath modes drive decay exponent m."""
    if not 1 <= m <= n - 1:
        raise IndexError(f"exponent index m={m} out of range for n={n} (need 1..n-1)")
    if m == 1:
        return 0
    if m == 2:
        return 1
    return n + 1 - m


def exponent_for_transition(n: int, k: int) -> int:
    """Decay exponent index (1-based) fed by modes on transition k."""
    if not 0 <= k <= n - 2:
        raise IndexError(f"transition index k={k} out of range for n={n}")
    if k == 0:
        return 1
    if k == 1:
        return 2
    return n + 1 - k


def filter_positions_for_exponent(n: int, m: int) -> tuple[int, int, int]:
    """Cyclically adjacent slot triple (lower, centre, upper) entering chi_m.

    chi_m = eta_lower - 2*eta_centre + eta_upper.  At n=2 both outer slots
    coincide, collapsing to -2*eta_1 + 2*eta_2.
    """
    k = transition_for_exponent(n, m)
    return (k - 1) % n + 1, k % n + 1, (k + 1) % n + 1


def _position_filter_grid(omegas: np.ndarray, schedule: PulseSchedule) -> np.ndarray:
    """eta_l(w) for all slots at once: (K, n) complex for K frequencies.

    Each eta_l is the phase-weighted sum of segment windows, which telescopes
    into boundary-exponential differences:

        eta_l(w) = (1/w) * sum_j [exp(i w t_start(j,l)) - exp(i w t_end(j,l))].

    The w = 0 entries use the limit -i * sum_j dt_j(l).
    """
    omegas = np.asarray(omegas, dtype=float)
    boundaries = schedule.boundaries
    n, cycles = schedule.n, schedule.cycles
    k_total = omegas.shape[0]
    out = np.empty((k_total, n), dtype=complex)
    zero_limit = -1j * schedule.segments.sum(axis=0)

    chunk = max(1, _CHUNK_ELEMS // (boundaries.size + 1))
    for start in range(0, k_total, chunk):
        w = omegas[start : start + chunk]
        edge = np.exp(1j * w[:, None] * boundaries[None, :])
        diffs = edge[:, :-1] - edge[:, 1:]
        sums = diffs.reshape(w.size, cycles, n).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            block = sums / w[:, None]
        zero = w == 0.0
        if zero.any():
            block[zero, :] = zero_limit[None, :]
        out[start : start + chunk] = block
    return out


def position_filter(position: int, omega: float, schedule: PulseSchedule) -> complex:
    """eta_l: response of intra-cycle segment slot l accumulated over cycles."""
    n = schedule.n
    if not 1 <= position <= n:
        raise IndexError(f"slot index l={position} out of range for n={n} (need 1..n)")
    grid = _position_filter_grid(np.atleast_1d(float(omega)), schedule)
    return complex(grid[0, position - 1])


def exponent_filter(m: int, omega: float, schedule: PulseSchedule) -> complex:
    """chi_m: filter amplitude entering decay exponent m at frequency omega."""
    lo, mid, hi = filter_positions_for_exponent(schedule.n, m)
    grid = _position_filter_grid(np.atleast_1d(float(omega)), schedule)[0]
    return complex(grid[lo - 1] - 2.0 * grid[mid - 1] + grid[hi - 1])


@dataclass(frozen=True)
class FilterEvaluation:
    """All position and exponent filters of a schedule at one frequency."""

    omega: float
    position_filters: np.ndarray  # eta_1..eta_n
    exponent_filters: np.ndarray  # chi_1..chi_{n-1}


def filter_evaluation(omega: float, schedule: PulseSchedule) -> FilterEvaluation:
    n = schedule.n
    eta = _position_filter_grid(np.atleast_1d(float(omega)), schedule)[0]
    chi = np.empty(n - 1, dtype=complex)
    for m in range(1, n):
        lo, mid, hi = filter_positions_for_exponent(n, m)
        chi[m - 1] = eta[lo - 1] - 2.0 * eta[mid - 1] + eta[hi - 1]
    return FilterEvaluation(omega=float(omega), position_filters=eta, exponent_filters=chi)


def _thermal_weight(omegas: np.ndarray, bath: BathSpec) -> np.ndarray:
    """(1/2) I(w) coth(w/(2 Tp)) with the finite w=0 limit alpha*Tp/4."""
    out = np.empty(omegas.shape, dtype=float)
    zero = omegas == 0.0
    nz = ~zero
    w = omegas[nz]
    out[nz] = 0.5 * (bath.alpha / 4.0) * w * np.exp(-w / bath.cutoff) / np.tanh(
        w / (2.0 * bath.temperature)
    )
    out[zero] = bath.alpha * bath.temperature / 4.0
    return out


def decay_integrand(omegas, schedule: PulseSchedule, bath: BathSpec) -> np.ndarray:
    """Rows (1/2) I(w) coth(w/(2 Tp)) |chi_m(w)|^2 for m = 1..n-1, shape (n-1, K)."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    n = schedule.n
    eta = _position_filter_grid(omegas, schedule)
    weight = _thermal_weight(omegas, bath)
    rows = np.empty((n - 1, omegas.size), dtype=float)
    for m in range(1, n):
        lo, mid, hi = filter_positions_for_exponent(n, m)
        chi = eta[:, lo - 1] - 2.0 * eta[:, mid - 1] + eta[:, hi - 1]
        rows[m - 1] = weight * (chi.real**2 + chi.imag**2)
    return rows


@dataclass(frozen=True)
class DecayExponents:
    """Converged decay exponents Gamma_1..Gamma_{n-1} with quadrature metadata."""

    gamma: np.ndarray
    quadrature_points: int
    estimated_relative_error: float


def _panel_integral(schedule: PulseSchedule, bath: BathSpec, panels: int) -> np.ndarray:
    edges = np.linspace(0.0, bath.cutoff, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    centre = 0.5 * (edges[1:] + edges[:-1])
    nodes = (centre[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    rows = decay_integrand(nodes, schedule, bath)
    # fixed-order numpy reduction, not BLAS, to keep results thread-invariant
    return np.sum(rows * weights[None, :], axis=1)


def _max_rel_change(prev: np.ndarray, curr: np.ndarray, zero_floor: float) -> float:
    err = 0.0
    for p, c in zip(prev, curr):
        scale = max(abs(c), abs(p))
        if scale <= zero_floor:
            continue
        err = max(err, abs(c - p) / scale)
    return err


def decay_exponents(
    schedule: PulseSchedule,
    bath: BathSpec,
    rel_tol: float = 1e-6,
    initial_panels: int | None = None,
    max_doublings: int = 12,
    extra_levels: int = 0,
    zero_floor: float = 1e-15,
) -> DecayExponents:
    """Integrate every decay exponent over [0, cutoff] to a relative target.

    Panel counts start at a few per filter oscillation (period 2*pi/T in w)
    and double until successive estimates of every Gamma_m agree within
    ``rel_tol``; ``extra_levels`` forces further doublings after convergence
    (used to probe quadrature stability).  Exponents whose successive
    estimates both sit below ``zero_floor`` count as converged zeros: such a
    value shifts the coherence ratio by less than double precision, and below
    that scale the integrand is round-off rather than signal.  Raises
    ConvergenceError, carrying the last two estimate vectors, if the target
    is never met.
    """
    if initial_panels is None:
        oscillations = bath.cutoff * schedule.total_time / (2.0 * math.pi)
        initial_panels = max(8, math.ceil(oscillations / 2.0))
    panels = initial_panels
    prev = curr = _panel_integral(schedule, bath, panels)
    for _ in range(max_doublings):
        panels *= 2
        curr = _panel_integral(schedule, bath, panels)
        if _max_rel_change(prev, curr, zero_floor) <= rel_tol:
            for _ in range(extra_levels):
                panels *= 2
                prev, curr = curr, _panel_integral(schedule, bath, panels)
            return DecayExponents(
                gamma=curr,
                quadrature_points=panels * GL_ORDER,
                estimated_relative_error=_max_rel_change(prev, curr, zero_floor),
            )
        prev = curr
    raise ConvergenceError(
        f"decay exponents did not converge to rel_tol={rel_tol:g} within "
        f"{max_doublings} doublings ({panels} panels)",
        previous=prev,
        current=curr,
    )


def coherence_ratio(
    schedule: PulseSchedule, bath: BathSpec, rel_tol: float = 1e-6, **quad_kwargs
) -> float:
    """Surviving fraction P(T) = exp(-sum_m Gamma_m) of the (0,1) coherence."""
    exponents = decay_exponents(schedule, bath, rel_tol=rel_tol, **quad_kwargs)
    return float(np.exp(-exponents.gamma.sum()))


@dataclass(frozen=True)
class CoherenceCurve:
    """Sampled (T, P(T)) pairs for one scheme and bath."""

    scheme: Scheme
    bath: BathSpec
    n: int
    cycles: int
    times: np.ndarray
    values: np.ndarray

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.values.tolist()))


def sweep_curve(
    template: ScheduleSpec,
    bath: BathSpec,
    t_grid,
    rel_tol: float = 1e-6,
    workers: int = 1,
    **quad_kwargs,
) -> CoherenceCurve:
    """Evaluate P(T) over a grid of total times, rebuilding the schedule each time.

    The grid must be strictly increasing and positive.  Points are independent;
    with ``workers`` > 1 they are evaluated by a thread pool, and results are
    assembled in grid order so the output never depends on the worker count.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1:
        raise ValueError("time grid must be a non-empty 1-D array")
    if np.any(t_grid <= 0):
        raise ValueError("time grid values must be > 0")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("time grid must be strictly increasing")

    def point(t: float) -> float:
        schedule = build_schedule(dataclasses.replace(template, total_time=t))
        try:
            return coherence_ratio(schedule, bath, rel_tol=rel_tol, **quad_kwargs)
        except ConvergenceError as err:
            raise ConvergenceError(
                f"{err} (while evaluating T={t:.6g})", err.previous, err.current
            ) from err

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = np.fromiter(
                pool.map(point, t_grid.tolist()), dtype=float, count=t_grid.size
            )
    else:
        values = np.fromiter(
            (point(t) for t in t_grid.tolist()), dtype=float, count=t_grid.size
        )
    return CoherenceCurve(
        scheme=template.scheme,
        bath=bath,
        n=template.n,
        cycles=template.cycles,
        times=t_grid,
        values=values,
    )
