"""Acceptance suite: one test per release criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -rA`` to see every line.

Criterion 6 (pointwise Uhrig dominance over a grid reaching deep decay) is
known to fail for the reference parameters and is kept as an honest red: the
Uhrig scheme's widest pulse gap exceeds the periodic gap by a factor pi/2, so
its filter admits the bath below the cutoff from T ~ 1.9 onward while the
periodic scheme holds to T ~ 3.1.  Uhrig dominance is real but confined to
the high-coherence storage regime, which the companion (non-criterion) test
at the bottom demonstrates.  See the README for the full account.
"""

import math

import numpy as np
import pytest

from ladder_dd.calibration import run_calibration_suite
from ladder_dd.cli import DEFAULT_T_MAX, EXIT_OK, main
from ladder_dd.kernel import (
    BathSpec,
    coherence_ratio,
    decay_exponents,
    decay_integrand,
)
from ladder_dd.operators import (
    build_decoupling_group,
    group_average,
    max_abs,
    sigma_z,
    verify_decoupling,
)
from ladder_dd.schedules import Scheme, ScheduleSpec, build_schedule, make_schedule
from ladder_dd.kernel import sweep_curve

REFERENCE_BATH = BathSpec(alpha=0.25, cutoff=100.0, temperature=150.0)


def _report(number: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {number} ({name}): {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" -- {detail}"
    print(line)
    assert ok, line


def _reference_template(scheme: Scheme) -> ScheduleSpec:
    return ScheduleSpec(scheme=scheme, n=6, cycles=50, total_time=1.0)


def test_criterion_1_decoupling_condition():
    worst = 0.0
    for n in range(2, 9):
        report = verify_decoupling(n)
        worst = max(worst, max(report.residuals))
    _report(1, "decoupling condition n=2..8", worst <= 1e-12,
            f"worst residual {worst:.2e}")


def test_criterion_2_group_structure():
    worst_power = 0.0
    worst_scalar = 0.0
    for n in range(2, 9):
        group = build_decoupling_group(n)
        power = np.eye(n, dtype=complex)
        for element in group.elements:
            worst_power = max(worst_power, max_abs(element - power))
            power = power @ group.generator
        nth = np.linalg.matrix_power(group.generator, n)
        scalar = nth[0, 0]
        worst_scalar = max(
            worst_scalar, abs(abs(scalar) - 1), max_abs(nth - scalar * np.eye(n))
        )
    ok = worst_power <= 1e-12 and worst_scalar <= 1e-12
    _report(2, "group powers and closure n=2..8", ok,
            f"powers {worst_power:.2e}, closure {worst_scalar:.2e}")


def test_criterion_3_schedule_invariants():
    worst_sum = worst_uniform = worst_symmetry = 0.0
    for n in range(2, 7):
        for cycles in (1, 2, 50):
            for scheme in (Scheme.PDD, Scheme.UDD):
                total_time = 2.5
                schedule = make_schedule(scheme, n, cycles, total_time)
                worst_sum = max(
                    worst_sum, abs(schedule.segments.sum() - total_time) / total_time
                )
                if scheme is Scheme.PDD:
                    spread = schedule.segments.max() - schedule.segments.min()
                    worst_uniform = max(worst_uniform, spread / total_time)
                else:
                    fr = schedule.fractions
                    mirror = np.abs(fr + fr[::-1] - 1.0).max()
                    worst_symmetry = max(worst_symmetry, mirror)
    ok = worst_sum <= 1e-12 and worst_uniform <= 1e-12 and worst_symmetry <= 1e-14
    _report(3, "schedule sums, uniformity, symmetry", ok,
            f"sum {worst_sum:.2e}, uniform {worst_uniform:.2e}, "
            f"mirror {worst_symmetry:.2e}")


def test_criterion_4_oracle_equivalence():
    results = run_calibration_suite(tol=1e-6)
    for result in results:
        print(f"  case {result.case.name}: observed {result.observed_ratio:.9f} "
              f"predicted {result.predicted_ratio:.9f} rel {result.rel_error:.2e}")
    worst = max(result.rel_error for result in results)
    _report(4, "Fock evolution vs filter formulas (n=2,3)",
            all(result.passed for result in results),
            f"worst relative deviation {worst:.2e}")


def test_criterion_5_quadrature_robustness():
    total_time = 2.5
    panels = 2**20  # >= 1e6 uniform midpoint panels
    worst_riemann = 0.0
    worst_depth = 0.0
    for scheme in (Scheme.PDD, Scheme.UDD):
        schedule = make_schedule(scheme, 6, 50, total_time)
        adaptive = decay_exponents(schedule, REFERENCE_BATH)
        width = REFERENCE_BATH.cutoff / panels
        nodes = (np.arange(panels) + 0.5) * width
        riemann = np.zeros(5)
        chunk = 65536
        for start in range(0, panels, chunk):
            rows = decay_integrand(nodes[start : start + chunk], schedule, REFERENCE_BATH)
            riemann += rows.sum(axis=1)
        riemann *= width
        worst_riemann = max(
            worst_riemann, np.max(np.abs(adaptive.gamma - riemann) / riemann)
        )
        deeper = decay_exponents(schedule, REFERENCE_BATH, extra_levels=1)
        worst_depth = max(
            worst_depth,
            np.max(np.abs(adaptive.gamma - deeper.gamma) / np.abs(deeper.gamma)),
        )
    ok = worst_riemann <= 1e-6 and worst_depth <= 1e-6
    _report(5, "exponents vs 2^20-panel Riemann sum", ok,
            f"riemann {worst_riemann:.2e}, extra depth {worst_depth:.2e}")


def test_criterion_6_reference_scenario_ordering():
    grid = np.linspace(DEFAULT_T_MAX / 60, DEFAULT_T_MAX, 60)
    pdd = sweep_curve(_reference_template(Scheme.PDD), REFERENCE_BATH, grid, workers=4)
    udd = sweep_curve(_reference_template(Scheme.UDD), REFERENCE_BATH, grid, workers=4)
    spans = pdd.values.min() <= 0.35 and pdd.values.max() >= 0.99
    dominated = udd.values >= pdd.values
    strict_needed = pdd.values <= 0.9
    strict_ok = np.all(udd.values[strict_needed] > pdd.values[strict_needed])
    detail = f"grid spans P_pdd [{pdd.values.min():.3f}, {pdd.values.max():.3f}]"
    if not np.all(dominated):
        first = grid[~dominated][0]
        detail += (f"; UDD ordering breaks from T={first:.3f} on "
                   f"({int((~dominated).sum())}/60 points, known model behaviour; "
                   f"see module docstring)")
    _report(6, "pointwise UDD dominance down to P_pdd ~ 0.3",
            bool(spans and np.all(dominated) and strict_ok), detail)


def test_criterion_7_analytic_limits():
    template = make_schedule(Scheme.PDD, 6, 50, 1e-9)
    short = coherence_ratio(template, REFERENCE_BATH)
    short_ok = abs(short - 1.0) <= 1e-9

    decoupled = BathSpec(alpha=0.0, cutoff=100.0, temperature=150.0)
    flat_ok = all(
        coherence_ratio(make_schedule(Scheme.UDD, 6, 50, t), decoupled) == 1.0
        for t in (0.5, 2.0, 3.0)
    )

    schedule = make_schedule(Scheme.PDD, 6, 50, 2.0)
    base = coherence_ratio(schedule, REFERENCE_BATH)
    power_ok = True
    for c in (0.5, 2.0):
        scaled_bath = BathSpec(alpha=0.25 * c, cutoff=100.0, temperature=150.0)
        scaled = coherence_ratio(schedule, scaled_bath)
        power_ok = power_ok and math.isclose(scaled, base**c, rel_tol=1e-9)
    _report(7, "P(T->0)=1, P(alpha=0)=1, power law in alpha",
            short_ok and flat_ok and power_ok,
            f"short {abs(short - 1.0):.1e}")


def test_criterion_8_deterministic_output(tmp_path):
    args = ["curve", "--t-points", "10", "--out"]
    paths = [str(tmp_path / f"run{i}.csv") for i in range(3)]
    workers = ["1", "1", "4"]
    for path, count in zip(paths, workers):
        assert main(args + [path, "--workers", count]) == EXIT_OK
    blobs = [open(path, "rb").read() for path in paths]
    ok = blobs[0] == blobs[1] == blobs[2]
    _report(8, "byte-identical CSV across reruns and worker counts", ok,
            f"{len(blobs[0])} bytes")


def test_udd_dominance_in_storage_regime():
    # companion demonstration: in the regime where decoupling is doing its
    # job (coherence near one), Uhrig timing beats periodic timing pointwise
    # and extends the storage time severalfold
    grid = np.linspace(0.03, 1.8, 60)
    pdd = sweep_curve(_reference_template(Scheme.PDD), REFERENCE_BATH, grid, workers=4)
    udd = sweep_curve(_reference_template(Scheme.UDD), REFERENCE_BATH, grid, workers=4)
    assert np.all(udd.values >= pdd.values)
    interior = pdd.values <= 0.999
    assert interior.sum() >= 40
    assert np.all(udd.values[interior] > pdd.values[interior])
    # storage time at the 1% coherence-loss threshold
    t_pdd = grid[pdd.values >= 0.99][-1]
    t_udd = grid[udd.values >= 0.99][-1]
    assert t_udd / t_pdd >= 2.0
    print(f"  storage time at 1% loss: periodic {t_pdd:.3f}, uhrig {t_udd:.3f} "
          f"({t_udd / t_pdd:.1f}x)")
