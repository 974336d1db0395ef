"""Spin correlation functions: operator expectations and their closed forms.

Each closed form is a plain trigonometric formula; the matching operator
route (build the tensor-product observable and take the expectation) is kept
deliberately separate so the two can be tested against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from .qlinalg import DensityMatrix, PureState, spin_operator, tensor_product
from .states import (
    Direction,
    TriorthogonalSpec,
    ZeroProbability,
    PROBABILITY_FLOOR,
)

IMAG_RESIDUE_TOL = 1e-10


class DimensionMismatch(ValueError):
    """Operator and state dimensions disagree."""


@dataclass(frozen=True)
class CorrelationRecord:
    directions: tuple
    value: float
    kind: str  # "unconditional" | "conditional-plus" | "conditional-minus"


def expectation(state, operator: np.ndarray) -> float:
    """<psi|O|psi> for a PureState, or Tr[rho O] for a DensityMatrix.

    The imaginary residue must be below 1e-10 (the operator is expected to be
    Hermitian); it is checked and discarded.
    """
    operator = np.asarray(operator, dtype=complex)
    if isinstance(state, PureState):
        if operator.shape != (2**state.n, 2**state.n):
            raise DimensionMismatch(f"operator shape {operator.shape} vs 2^{state.n}")
        val = complex(np.vdot(state.amplitudes, operator @ state.amplitudes))
    elif isinstance(state, DensityMatrix):
        if operator.shape != state.matrix.shape:
            raise DimensionMismatch(f"operator shape {operator.shape} vs {state.matrix.shape}")
        val = complex(np.trace(state.matrix @ operator))
    else:
        raise TypeError(f"expected PureState or DensityMatrix, got {type(state)!r}")
    if abs(val.imag) > IMAG_RESIDUE_TOL:
        raise ValueError(f"imaginary residue {val.imag!r} exceeds 1e-10")
    return float(val.real)


def spin_product_operator(dirs) -> np.ndarray:
    """sigma(e_1) (x) sigma(e_2) (x) ... for the given directions."""
    op = spin_operator(dirs[0].theta, dirs[0].phi)
    for d in dirs[1:]:
        op = tensor_product(op, spin_operator(d.theta, d.phi))
    return op


def unconditional_correlation_closed(spec: TriorthogonalSpec, dirs) -> CorrelationRecord:
    """Unconditional N-particle correlation over the c1/c2 projector mixture.

    E = (c1^2 + (-1)^N c2^2) z_1...z_N cos(t_1)...cos(t_N): the two mixture
    branches contribute products of single-particle cosines of opposite label,
    so the c2 branch picks up a (-1)^N.  For even N the coefficients drop out
    entirely.  Either way the result is a product of single-particle factors,
    so these correlations are always classically explainable no matter how
    entangled the full state is.
    """
    dirs = tuple(dirs)
    n_keep = len(dirs)
    if n_keep < 1 or n_keep >= spec.n:
        raise ValueError(f"need 1 <= len(dirs) < n, got {n_keep}")
    value = spec.c1**2 + (-1.0) ** n_keep * spec.c2**2
    for z, d in zip(spec.labels, dirs):
        value *= z * cos(d.theta)
    return CorrelationRecord(dirs, float(value), "unconditional")


def conditional_probability(spec: TriorthogonalSpec, e3: Direction, branch: int) -> float:
    """p+ (branch=+1) or p- (branch=-1) for measuring particle 3 along e3."""
    c, s = cos(e3.theta / 2.0) ** 2, sin(e3.theta / 2.0) ** 2
    if branch == +1:
        return spec.c1**2 * c + spec.c2**2 * s
    if branch == -1:
        return spec.c1**2 * s + spec.c2**2 * c
    raise ValueError(f"branch must be +1 or -1, got {branch!r}")


def conditional_correlation_closed(
    spec: TriorthogonalSpec,
    e1: Direction,
    e2: Direction,
    e3: Direction,
    branch: int,
) -> CorrelationRecord:
    """Two-particle correlation within the +- subensemble selected by particle 3.

    E+-(e1, e2) = gamma cos(t1) cos(t2)
                +- z3 (c1 c2 / p+-) sin(t1) sin(t2) sin(t3)
                   cos(phi1 + gamma phi2 + z1 z3 phi3),
    with gamma = z1 z2.  The branch sign selects the subensemble in which
    particle 3 gave the outcome z3 (+) or -z3 (-).
    """
    if spec.n != 3:
        raise ValueError(f"closed form is specific to n=3, got n={spec.n}")
    z1, z2, z3 = spec.labels
    gamma = z1 * z2
    p = conditional_probability(spec, e3, branch)
    if p <= PROBABILITY_FLOOR:
        raise ZeroProbability(f"branch probability {p!r} below 1e-12")
    value = gamma * cos(e1.theta) * cos(e2.theta) + branch * z3 * (
        spec.c1 * spec.c2 / p
    ) * sin(e1.theta) * sin(e2.theta) * sin(e3.theta) * cos(
        e1.phi + gamma * e2.phi + z1 * z3 * e3.phi
    )
    kind = "conditional-plus" if branch == +1 else "conditional-minus"
    return CorrelationRecord((e1, e2, e3), float(value), kind)
