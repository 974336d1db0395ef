"""Triorthogonal n-particle states and the conditional-projection protocol.

A triorthogonal state is the two-term superposition
``c1 |z_1 ... z_n> + c2 |-z_1 ... -z_n>`` with real c1, c2 and per-particle
spin labels z_i = +-1.  Measuring a suffix of the particles along arbitrary
directions and keeping the runs with a fixed outcome leaves the remaining
particles in a conditional pure state; both the exact projection and the
analytic product formula for it live here, so each can check the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, pi, sin, sqrt

import numpy as np

from .qlinalg import BadNorm, BadSubset, DensityMatrix, PureState, NORM_TOL

PROBABILITY_FLOOR = 1e-12


class ZeroProbability(ValueError):
    """Conditioning on an outcome whose probability is numerically zero."""


@dataclass(frozen=True)
class Direction:
    """Measurement axis on the unit sphere, (polar, azimuthal) in radians.

    Raw values are preserved (negative theta is legal and meaningful in the
    half-angle formulas); ``normalized()`` gives the canonical representative
    with theta in [0, pi] and phi in [0, 2*pi).
    """

    theta: float
    phi: float

    def __post_init__(self):
        if not (np.isfinite(self.theta) and np.isfinite(self.phi)):
            raise ValueError("angles must be finite")

    @property
    def unit_vector(self) -> np.ndarray:
        st = sin(self.theta)
        return np.array([st * cos(self.phi), st * sin(self.phi), cos(self.theta)])

    def normalized(self) -> "Direction":
        x, y, z = self.unit_vector
        return Direction(float(np.arccos(np.clip(z, -1.0, 1.0))), float(np.arctan2(y, x) % (2 * pi)))


def _check_label(z: int) -> int:
    if z not in (+1, -1):
        raise ValueError(f"spin label must be +1 or -1, got {z!r}")
    return int(z)


@dataclass(frozen=True)
class TriorthogonalSpec:
    """Parameters of the two-term state: real (c1, c2) and n spin labels."""

    n: int
    c1: float
    c2: float
    labels: tuple

    def __post_init__(self):
        labels = tuple(_check_label(z) for z in self.labels)
        if self.n < 2 or len(labels) != self.n:
            raise ValueError(f"need n >= 2 labels, got n={self.n}, {len(labels)} labels")
        if abs(self.c1**2 + self.c2**2 - 1.0) > NORM_TOL:
            raise BadNorm(f"c1^2 + c2^2 = {self.c1**2 + self.c2**2!r}, not 1")
        object.__setattr__(self, "labels", labels)


@dataclass(frozen=True)
class ConditionalResult:
    """Post-measurement state of the kept particles and the outcome probability."""

    state: PureState
    probability: float


def _basis_index(labels) -> int:
    """Computational-basis index of |z_1 ... z_N> (particle 1 = MSB, +1 = bit 0)."""
    idx = 0
    for z in labels:
        idx = (idx << 1) | (0 if z == +1 else 1)
    return idx


def make_triorthogonal(spec: TriorthogonalSpec) -> PureState:
    """Build c1 |z_1 ... z_n> + c2 |-z_1 ... -z_n> in the computational basis."""
    amps = np.zeros(2**spec.n, dtype=complex)
    amps[_basis_index(spec.labels)] += spec.c1
    amps[_basis_index([-z for z in spec.labels])] += spec.c2
    return PureState(spec.n, amps)


def rotated_ket(d: Direction, label: int) -> PureState:
    """Single-particle eigenket of sigma(d) with eigenvalue ``label`` (+1 or -1).

    |z>* = cos(theta/2) e^{-i z phi/2} |z> + z sin(theta/2) e^{+i z phi/2} |-z>,
    expressed in the computational (z) basis.
    """
    z = _check_label(label)
    half = d.theta / 2.0
    on_z = cos(half) * np.exp(-1j * z * d.phi / 2.0)
    on_minus_z = z * sin(half) * np.exp(1j * z * d.phi / 2.0)
    amps = np.empty(2, dtype=complex)
    if z == +1:
        amps[0], amps[1] = on_z, on_minus_z
    else:
        amps[1], amps[0] = on_z, on_minus_z
    return PureState(1, amps)


def condition_on(state: PureState, measured: dict) -> ConditionalResult:
    """Project out measured particles and renormalize the remainder.

    ``measured`` maps 1-indexed particle numbers to ``(Direction, outcome)``
    pairs, where outcome is the +-1 eigenvalue found for that particle.  The
    kept particles retain their original relative order.  Raises
    :class:`ZeroProbability` when the selected outcome has probability below
    1e-12.
    """
    if not measured or len(measured) >= state.n:
        raise BadSubset("measured particles must form a non-empty strict subset")
    if any(p < 1 or p > state.n for p in measured):
        raise BadSubset(f"particle indices out of range 1..{state.n}")
    amps = state.amplitudes.reshape([2] * state.n)
    for p in sorted(measured, reverse=True):
        d, outcome = measured[p]
        vec = rotated_ket(d, outcome).amplitudes.conj()
        amps = np.tensordot(amps, vec, axes=([p - 1], [0]))
    prob = float(np.sum(np.abs(amps) ** 2))
    if prob <= PROBABILITY_FLOOR:
        raise ZeroProbability(f"outcome probability {prob!r} below 1e-12")
    kept = PureState(state.n - len(measured), amps.reshape(-1) / sqrt(prob))
    return ConditionalResult(kept, prob)


def _contraction_factors(d: Direction, z: int, outcome: int):
    """Coefficients (f, g) multiplying c1 and c2 when particle (label z) is
    projected onto the sigma(d) eigenket with eigenvalue ``outcome``."""
    half = d.theta / 2.0
    if outcome == z:
        f = cos(half) * np.exp(1j * z * d.phi / 2.0)
        g = z * sin(half) * np.exp(-1j * z * d.phi / 2.0)
    else:
        f = -z * sin(half) * np.exp(1j * z * d.phi / 2.0)
        g = cos(half) * np.exp(-1j * z * d.phi / 2.0)
    return f, g


def conditional_closed_form(spec: TriorthogonalSpec, measured: dict) -> ConditionalResult:
    """Analytic conditional state for a measured suffix of particles.

    ``measured`` must cover exactly particles N+1..n for some N >= 1, mapping
    each to ``(Direction, outcome)``.  Evaluates the explicit two-term product
    formula (no projection is performed), making this the independent oracle
    for :func:`condition_on`.
    """
    keys = sorted(measured)
    n_keep = spec.n - len(keys)
    if n_keep < 1 or keys != list(range(n_keep + 1, spec.n + 1)):
        raise BadSubset("closed form requires measuring a suffix N+1..n with N >= 1")
    amp1 = complex(spec.c1)
    amp2 = complex(spec.c2)
    for p in keys:
        d, outcome = measured[p]
        f, g = _contraction_factors(d, spec.labels[p - 1], _check_label(outcome))
        amp1 *= f
        amp2 *= g
    prob = abs(amp1) ** 2 + abs(amp2) ** 2
    if prob <= PROBABILITY_FLOOR:
        raise ZeroProbability(f"outcome probability {prob!r} below 1e-12")
    amps = np.zeros(2**n_keep, dtype=complex)
    kept_labels = spec.labels[:n_keep]
    amps[_basis_index(kept_labels)] += amp1 / sqrt(prob)
    amps[_basis_index([-z for z in kept_labels])] += amp2 / sqrt(prob)
    return ConditionalResult(PureState(n_keep, amps), float(prob))


def branch_probability(spec: TriorthogonalSpec, measured: dict) -> float:
    """Probability of the given measured-suffix outcome, by the product formula."""
    keys = sorted(measured)
    amp1, amp2 = complex(spec.c1), complex(spec.c2)
    for p in keys:
        d, outcome = measured[p]
        f, g = _contraction_factors(d, spec.labels[p - 1], _check_label(outcome))
        amp1 *= f
        amp2 *= g
    return float(abs(amp1) ** 2 + abs(amp2) ** 2)


def reduced_density(spec: TriorthogonalSpec, n_keep: int) -> DensityMatrix:
    """Unconditional reduced density matrix of particles 1..n_keep.

    Equals c1^2 |z_1..z_N><z_1..z_N| + c2^2 |-z_1..-z_N><-z_1..-z_N| -- a
    mixture of two product states, independent of any measurement direction
    chosen for the traced-out particles.
    """
    if n_keep < 1 or n_keep >= spec.n:
        raise BadSubset(f"need 1 <= n_keep < n, got {n_keep}")
    dim = 2**n_keep
    mat = np.zeros((dim, dim), dtype=complex)
    kept_labels = spec.labels[:n_keep]
    i_plus = _basis_index(kept_labels)
    i_minus = _basis_index([-z for z in kept_labels])
    mat[i_plus, i_plus] = spec.c1**2
    mat[i_minus, i_minus] = spec.c2**2
    return DensityMatrix(n_keep, mat)
