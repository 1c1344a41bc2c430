"""Calibration cases pitting the Fock-space evolution against the filter formulas.

Each case evolves a small atom+modes system exactly through a pulsed sequence
and compares the surviving coherence magnitude with exp(-Gamma) predicted by
the discrete-mode exponent.  Agreement across dimensions, schemes and cycle
counts pins down every sign and ordering convention at once; a deliberately
miswired variant is available as a negative control.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .fock_oracle import (
    ModeSpec,
    discrete_decay_exponent,
    evolve_pulsed,
    superposition_state,
)
from .kernel import (
    exponent_for_transition,
    filter_positions_for_exponent,
    position_filter,
)
from .operators import build_decoupling_group
from .schedules import Scheme, make_schedule

CALIBRATION_TOL = 1e-6


@dataclass(frozen=True)
class CalibrationCase:
    name: str
    n: int
    cycles: int
    scheme: Scheme
    total_time: float
    temperature: float
    modes: tuple[ModeSpec, ...]


@dataclass(frozen=True)
class CalibrationResult:
    case: CalibrationCase
    observed_exponent: float
    predicted_exponent: float
    observed_ratio: float
    predicted_ratio: float
    rel_error: float  # relative mismatch of the coherence ratios
    phase_shift: float
    passed: bool


def default_calibration_cases() -> tuple[CalibrationCase, ...]:
    """Weak-coupling cases covering n in {2,3}, N in {1,2}, 1-2 modes per transition."""
    return (
        CalibrationCase(
            name="n2-pdd-single-mode",
            n=2, cycles=1, scheme=Scheme.PDD, total_time=2.0, temperature=1.0,
            modes=(ModeSpec(transition=0, omega=1.0, coupling=0.1, fock_dim=25),),
        ),
        CalibrationCase(
            name="n2-udd-two-modes",
            n=2, cycles=2, scheme=Scheme.UDD, total_time=1.5, temperature=0.8,
            modes=(
                ModeSpec(transition=0, omega=0.9, coupling=0.08, fock_dim=21),
                ModeSpec(transition=0, omega=1.7, coupling=0.05j, fock_dim=11),
            ),
        ),
        CalibrationCase(
            name="n3-pdd-mode-per-transition",
            n=3, cycles=1, scheme=Scheme.PDD, total_time=2.0, temperature=0.5,
            modes=(
                ModeSpec(transition=0, omega=1.1, coupling=0.07, fock_dim=11),
                ModeSpec(transition=1, omega=1.4, coupling=0.06, fock_dim=9),
            ),
        ),
        CalibrationCase(
            name="n3-udd-mode-per-transition",
            n=3, cycles=2, scheme=Scheme.UDD, total_time=1.8, temperature=0.5,
            modes=(
                ModeSpec(transition=0, omega=1.1, coupling=0.07, fock_dim=11),
                ModeSpec(transition=1, omega=1.4, coupling=0.06, fock_dim=9),
            ),
        ),
        CalibrationCase(
            name="n3-pdd-two-modes-per-transition",
            n=3, cycles=1, scheme=Scheme.PDD, total_time=1.5, temperature=0.25,
            modes=(
                ModeSpec(transition=0, omega=1.0, coupling=0.05, fock_dim=6),
                ModeSpec(transition=0, omega=1.5, coupling=0.04, fock_dim=4),
                ModeSpec(transition=1, omega=1.2, coupling=0.05, fock_dim=5),
                ModeSpec(transition=1, omega=1.6, coupling=0.03, fock_dim=4),
            ),
        ),
    )


def _miswired_exponent(modes, temperature, schedule, n) -> float:
    # Negative control: flips the sign of the upper neighbour in every filter
    # combination, emulating a wrong toggling-sign convention.
    total = 0.0
    for mode in modes:
        m = exponent_for_transition(n, mode.transition)
        lo, mid, hi = filter_positions_for_exponent(n, m)
        chi = (
            position_filter(lo, mode.omega, schedule)
            - 2.0 * position_filter(mid, mode.omega, schedule)
            - position_filter(hi, mode.omega, schedule)
        )
        coth = 1.0 / math.tanh(mode.omega / (2.0 * temperature))
        total += 0.5 * abs(mode.coupling) ** 2 * abs(chi) ** 2 * coth
    return total


def run_case(
    case: CalibrationCase,
    tol: float = CALIBRATION_TOL,
    method: str = "exact",
    wrong_sign: bool = False,
) -> CalibrationResult:
    schedule = make_schedule(case.scheme, case.n, case.cycles, case.total_time)
    group = build_decoupling_group(case.n)
    atom = superposition_state(case.n)
    final = evolve_pulsed(
        case.n, case.modes, schedule, group, atom, case.temperature, method=method
    )
    start = complex(atom[0, 1])
    end = final.coherence()
    observed = abs(end) / abs(start)
    if wrong_sign:
        exponent = _miswired_exponent(case.modes, case.temperature, schedule, case.n)
    else:
        exponent = discrete_decay_exponent(case.modes, case.temperature, schedule, case.n)
    predicted = math.exp(-exponent)
    rel_error = abs(observed - predicted) / predicted
    return CalibrationResult(
        case=case,
        observed_exponent=-math.log(observed),
        predicted_exponent=exponent,
        observed_ratio=observed,
        predicted_ratio=predicted,
        rel_error=rel_error,
        phase_shift=cmath.phase(end / start),
        passed=rel_error <= tol,
    )


def run_calibration_suite(
    cases: tuple[CalibrationCase, ...] | None = None,
    tol: float = CALIBRATION_TOL,
    method: str = "exact",
    wrong_sign: bool = False,
) -> list[CalibrationResult]:
    if cases is None:
        cases = default_calibration_cases()
    return [run_case(case, tol=tol, method=method, wrong_sign=wrong_sign) for case in cases]
