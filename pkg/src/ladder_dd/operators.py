"""Transition operators and the cyclic decoupling pulse group of a ladder atom.

A ladder (Xi-type) n-level atom couples each level |k> only to its neighbours
|k+1> and |k-1>.  Pure dephasing acts through the diagonal transition
operators sigma_z on each (k, k+1) pair.  A single generator pulse built from
pi/2 x-rotations on every transition cyclically permutes the levels, and the
group {I, g, g^2, ..., g^(n-1)} it generates averages every sigma_z to zero.
That group average is the decoupling condition verified here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Max-entry tolerance for "zero" and "unitary": ~1e4 x double epsilon,
# absorbing round-off from repeated small matrix products.
ZERO_TOL = 1e-12


def _check_transition(n: int, k: int) -> None:
    if n < 2:
        raise ValueError(f"atom dimension must be >= 2, got n={n}")
    if not 0 <= k <= n - 2:
        raise IndexError(
            f"transition index k={k} out of range for n={n} (need 0 <= k <= n-2)"
        )


def sigma_x(n: int, k: int) -> np.ndarray:
    """Off-diagonal coupling of levels k and k+1: entries (k,k+1)=(k+1,k)=1."""
    _check_transition(n, k)
    op = np.zeros((n, n), dtype=complex)
    op[k, k + 1] = 1.0
    op[k + 1, k] = 1.0
    return op


def sigma_z(n: int, k: int) -> np.ndarray:
    """Diagonal dephasing operator of the (k, k+1) transition.

    Convention: +1 at level k+1, -1 at level k, zero elsewhere (the upper
    level carries the positive sign, as for the usual two-level Pauli Z
    with |1><1| - |0><0| ordering).
    """
    _check_transition(n, k)
    op = np.zeros((n, n), dtype=complex)
    op[k + 1, k + 1] = 1.0
    op[k, k] = -1.0
    return op


def x_pulse(n: int, k: int) -> np.ndarray:
    """exp(i * sigma_x(n, k) * pi/2) in closed form.

    Identity outside the {k, k+1} subspace; on the subspace the exponential
    collapses to i*sigma_x because cos(pi/2)=0 and sin(pi/2)=1.
    """
    _check_transition(n, k)
    op = np.eye(n, dtype=complex)
    op[k, k] = 0.0
    op[k + 1, k + 1] = 0.0
    op[k, k + 1] = 1j
    op[k + 1, k] = 1j
    return op


@dataclass(frozen=True)
class DecouplingGroup:
    """Cyclic pulse group {I, g, g^2, ..., g^(n-1)} of an n-level ladder atom.

    ``elements[m]`` is the m-th power of the generator ``elements[1]``; the
    generator itself is the ordered product of x_pulse factors over all
    transitions, lowest transition leftmost.  The n-th power of the generator
    is a unit-modulus scalar times the identity.
    """

    dim: int
    elements: tuple[np.ndarray, ...]

    @property
    def generator(self) -> np.ndarray:
        return self.elements[1]

    def __len__(self) -> int:
        return len(self.elements)


def build_decoupling_group(n: int) -> DecouplingGroup:
    """Construct the decoupling group for an n-level ladder atom."""
    if n < 2:
        raise ValueError(f"atom dimension must be >= 2, got n={n}")
    g = x_pulse(n, 0)
    for k in range(1, n - 1):
        g = g @ x_pulse(n, k)
    elements = [np.eye(n, dtype=complex)]
    for _ in range(n - 1):
        elements.append(elements[-1] @ g)
    return DecouplingGroup(dim=n, elements=tuple(elements))


def group_average(group: DecouplingGroup, op: np.ndarray) -> np.ndarray:
    """(1/|G|) sum_m g_m^dag op g_m over all group elements."""
    op = np.asarray(op, dtype=complex)
    if op.shape != (group.dim, group.dim):
        raise ValueError(
            f"operator shape {op.shape} does not match group dimension {group.dim}"
        )
    acc = np.zeros_like(op)
    for g in group.elements:
        acc += g.conj().T @ op @ g
    return acc / len(group.elements)


def max_abs(op: np.ndarray) -> float:
    """Largest entry magnitude, the norm used for all zero/unitary checks."""
    return float(np.max(np.abs(op)))


def is_unitary(op: np.ndarray, tol: float = ZERO_TOL) -> bool:
    op = np.asarray(op)
    return max_abs(op.conj().T @ op - np.eye(op.shape[0])) <= tol


@dataclass(frozen=True)
class DecouplingReport:
    """Per-transition residuals of the group-averaged dephasing operators."""

    dim: int
    residuals: tuple[float, ...]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tolerance for r in self.residuals)


def verify_decoupling(n: int, tol: float = ZERO_TOL) -> DecouplingReport:
    """Check that the group average annihilates sigma_z on every transition.

    Returns the max-entry magnitude of the averaged operator for each
    transition; the group decouples pure dephasing iff all residuals are
    at the round-off floor.
    """
    group = build_decoupling_group(n)
    residuals = tuple(
        max_abs(group_average(group, sigma_z(n, k))) for k in range(n - 1)
    )
    return DecouplingReport(dim=n, residuals=residuals, tolerance=tol)
