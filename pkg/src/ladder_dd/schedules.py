"""Pulse timing schedules: periodic and Uhrig fraction generators.

A run of N decoupling cycles on an n-level atom places M = n*N - 1 pulses
strictly inside (0, T), plus one closing pulse at T itself.  A schedule is
fixed by the ordered fractions delta_1 < ... < delta_M at which the interior
pulses fire.  With delta_0 = 0 and delta_{nN} = 1 appended, the fraction
differences give the free-evolution segment lengths, grouped n per cycle.

Periodic scheduling spaces the pulses uniformly, delta_i = i/(M+1).  Uhrig
scheduling uses delta_i = sin^2(i*pi/(2M+2)), which crowds pulses toward both
ends of the run and suppresses dephasing to higher order for the same pulse
count.  Custom fraction lists are accepted as-is after validation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class Scheme(enum.Enum):
    PDD = "pdd"
    UDD = "udd"
    CUSTOM = "custom"


def pulse_count(n: int, cycles: int) -> int:
    """Number of interior pulses, n*cycles - 1 (the pulse at T is separate)."""
    if n < 2:
        raise ValueError(f"atom dimension must be >= 2, got n={n}")
    if cycles < 1:
        raise ValueError(f"cycle count must be >= 1, got cycles={cycles}")
    return n * cycles - 1


def pdd_fractions(m: int) -> np.ndarray:
    """Equidistant pulse fractions i/(M+1), i = 1..M."""
    if m < 1:
        raise ValueError(f"pulse count must be >= 1, got M={m}")
    return np.arange(1, m + 1, dtype=float) / (m + 1)


def udd_fractions(m: int) -> np.ndarray:
    """Uhrig pulse fractions sin^2(i*pi/(2M+2)), i = 1..M.

    Symmetric about 1/2: delta_i + delta_{M+1-i} = 1 up to round-off.
    """
    if m < 1:
        raise ValueError(f"pulse count must be >= 1, got M={m}")
    i = np.arange(1, m + 1, dtype=float)
    return np.sin(i * math.pi / (2 * m + 2)) ** 2


def _validate_custom(fractions: tuple[float, ...], expected: int) -> None:
    if len(fractions) != expected:
        raise ValueError(
            f"custom fractions: expected {expected} values (n*cycles - 1), "
            f"got {len(fractions)}"
        )
    prev = 0.0
    for idx, value in enumerate(fractions):
        if not 0.0 < value < 1.0:
            raise ValueError(
                f"custom fractions: value {value!r} at index {idx} outside (0, 1)"
            )
        if value <= prev:
            raise ValueError(
                f"custom fractions: value {value!r} at index {idx} not strictly "
                f"increasing"
            )
        prev = value


@dataclass(frozen=True)
class ScheduleSpec:
    """Scheme, atom dimension, cycle count and total duration of a run."""

    scheme: Scheme
    n: int
    cycles: int
    total_time: float
    custom_fractions: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"atom dimension must be >= 2, got n={self.n}")
        if self.cycles < 1:
            raise ValueError(f"cycle count must be >= 1, got cycles={self.cycles}")
        if not self.total_time > 0:
            raise ValueError(f"total time must be > 0, got {self.total_time}")
        if self.scheme is Scheme.CUSTOM:
            if self.custom_fractions is None:
                raise ValueError("custom scheme requires an explicit fraction list")
            _validate_custom(self.custom_fractions, pulse_count(self.n, self.cycles))
        elif self.custom_fractions is not None:
            raise ValueError(f"scheme {self.scheme.value} does not take custom fractions")


@dataclass(frozen=True)
class PulseSchedule:
    """A built schedule: fractions, segment lengths and cycle durations.

    ``boundaries`` holds the nN+1 absolute instants 0 = t_0 < t_1 < ... <
    t_{nN} = T bounding the free-evolution segments.  ``segments[j-1, i-1]``
    is the i-th segment of cycle j; segment (j, i) spans the boundary pair
    with flat index m = (j-1)*n + i.
    """

    spec: ScheduleSpec
    fractions: np.ndarray
    boundaries: np.ndarray
    segments: np.ndarray
    cycle_lengths: np.ndarray

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def cycles(self) -> int:
        return self.spec.cycles

    @property
    def total_time(self) -> float:
        return self.spec.total_time


def build_schedule(spec: ScheduleSpec) -> PulseSchedule:
    """Evaluate the scheme's closed-form fractions and decompose into segments.

    Fractions are computed directly from the closed forms, never by
    accumulation, so large pulse counts do not drift.
    """
    m = pulse_count(spec.n, spec.cycles)
    if spec.scheme is Scheme.PDD:
        fractions = pdd_fractions(m)
    elif spec.scheme is Scheme.UDD:
        fractions = udd_fractions(m)
    else:
        fractions = np.asarray(spec.custom_fractions, dtype=float)
    boundaries = np.concatenate(([0.0], fractions, [1.0])) * spec.total_time
    segments = np.diff(boundaries).reshape(spec.cycles, spec.n)
    cycle_lengths = segments.sum(axis=1)
    return PulseSchedule(
        spec=spec,
        fractions=fractions,
        boundaries=boundaries,
        segments=segments,
        cycle_lengths=cycle_lengths,
    )


def make_schedule(
    scheme: Scheme | str,
    n: int,
    cycles: int,
    total_time: float,
    custom_fractions: tuple[float, ...] | None = None,
) -> PulseSchedule:
    """Convenience wrapper building a schedule from bare parameters."""
    if isinstance(scheme, str):
        scheme = Scheme(scheme.lower())
    return build_schedule(
        ScheduleSpec(
            scheme=scheme,
            n=n,
            cycles=cycles,
            total_time=total_time,
            custom_fractions=custom_fractions,
        )
    )


def fractions_text(fractions: np.ndarray) -> str:
    """One fraction per line, 17 significant digits (binary64 round-trip)."""
    return "".join(f"{value:.17g}\n" for value in np.asarray(fractions, dtype=float))


def parse_fractions_text(text: str) -> tuple[float, ...]:
    """Inverse of fractions_text; skips blank lines and '#' comments."""
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ValueError(f"line {lineno}: not a number: {line!r}") from None
    return tuple(values)
