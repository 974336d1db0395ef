"""Dense complex linear algebra for few-qubit problems.

Operators are plain numpy arrays of shape (2^N, 2^N); state vectors are
wrapped in :class:`PureState` and density operators in :class:`DensityMatrix`.
Basis convention everywhere: particle 1 owns the most significant index bit,
bit value 0 means spin-up along z and bit value 1 means spin-down.

The Hermitian eigensolver is a cyclic Jacobi iteration with complex
rotations.  It is meant for the small dimensions that occur here (4x4 and
8x8 Bell operators, up to 2^12 for full statevector work), not as a general
LAPACK replacement.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

HERMITICITY_TOL = 1e-12
NORM_TOL = 1e-12
PSD_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


class NotHermitian(ValueError):
    """Matrix handed to the Hermitian eigensolver is not Hermitian."""


class BadSubset(ValueError):
    """Particle subset is empty or not a strict subset of 1..N."""


class BadNorm(ValueError):
    """Amplitude vector (or coefficient pair) is not normalized."""


def hermiticity_defect(a: np.ndarray) -> float:
    """Largest element-wise deviation of ``a`` from its conjugate transpose."""
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


@dataclass(frozen=True)
class PureState:
    """Normalized state vector of ``n`` spin-1/2 particles.

    ``amplitudes[k]`` multiplies the product basis ket whose bits are the
    binary digits of ``k`` (particle 1 = most significant bit, 0 = up).
    """

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.n < 1 or amps.shape[0] != 2**self.n:
            raise ValueError(f"expected 2^{self.n} amplitudes, got {amps.shape[0]}")
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise BadNorm(f"state norm^2 = {norm2!r}, not 1 within {NORM_TOL}")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(self.n, np.outer(self.amplitudes, self.amplitudes.conj()))

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite operator on ``n`` particles."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        dim = 2**self.n
        if mat.shape != (dim, dim):
            raise ValueError(f"expected shape {(dim, dim)}, got {mat.shape}")
        if hermiticity_defect(mat) > HERMITICITY_TOL:
            raise NotHermitian("density matrix is not Hermitian within 1e-12")
        tr = float(mat.trace().real)
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"trace = {tr!r}, not 1 within {NORM_TOL}")
        evals, _ = hermitian_eigen(mat)
        if evals[-1] < -PSD_TOL:
            raise ValueError(f"negative eigenvalue {evals[-1]!r}")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


def tensor_product(a, b):
    """Kronecker product with the left operand as the high-significance factor.

    Both operands must be of the same kind: two PureStates, two vectors, or
    two matrices.  Consistent with the PureState bit ordering: the left
    factor's particles come first.
    """
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(a.n + b.n, np.kron(a.amplitudes, b.amplitudes))
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise ValueError("operands must both be vectors or both be matrices")
    return np.kron(a, b)


def spin_operator(theta: float, phi: float) -> np.ndarray:
    """Spin operator along the unit vector with polar/azimuthal angles (theta, phi).

    sigma(e) = sin(theta)cos(phi) sigma_x + sin(theta)sin(phi) sigma_y
             + cos(theta) sigma_z.  Eigenvalues are +1 and -1; the +1
    eigenvector is cos(theta/2) e^{-i phi/2}|up> + sin(theta/2) e^{+i phi/2}|down>.
    """
    st, ct = np.sin(theta), np.cos(theta)
    return np.array(
        [[ct, st * np.exp(-1j * phi)], [st * np.exp(1j * phi), -ct]], dtype=complex
    )


def hermitian_eigen(h: np.ndarray, *, off_tol: float = 1e-13, max_sweeps: int = 100):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues sorted in
    descending order (ties broken by first occurrence) and eigenvectors as
    the corresponding orthonormal columns.  Raises :class:`NotHermitian` if
    the input fails the Hermiticity check.
    """
    a = np.asarray(h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if hermiticity_defect(a) > HERMITICITY_TOL:
        raise NotHermitian(f"Hermiticity defect {hermiticity_defect(a)!r} > 1e-12")
    n = a.shape[0]
    a = (a + a.conj().T) / 2.0
    v = np.eye(n, dtype=complex)

    for _ in range(max_sweeps):
        # computed from the off-diagonal entries directly: the cancellation in
        # ||A||_F^2 - ||diag||_F^2 would floor the measurable norm near 1e-7
        off = sqrt(float(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2)))
        if off < off_tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                beta = abs(apq)
                if beta < 1e-300:
                    continue
                phase = apq / beta
                tau = (a[q, q].real - a[p, p].real) / (2.0 * beta)
                if tau >= 0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                # 2x2 unitary: columns (c, -conj(phase) s) and (s, conj(phase) c)
                gp = np.array([c, -np.conj(phase) * s])
                gq = np.array([s, np.conj(phase) * c])
                colp = a[:, p] * gp[0] + a[:, q] * gp[1]
                colq = a[:, p] * gq[0] + a[:, q] * gq[1]
                a[:, p], a[:, q] = colp, colq
                rowp = a[p, :] * np.conj(gp[0]) + a[q, :] * np.conj(gp[1])
                rowq = a[p, :] * np.conj(gq[0]) + a[q, :] * np.conj(gq[1])
                a[p, :], a[q, :] = rowp, rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vcolp = v[:, p] * gp[0] + v[:, q] * gp[1]
                vcolq = v[:, p] * gq[0] + v[:, q] * gq[1]
                v[:, p], v[:, q] = vcolp, vcolq

    evals = np.real(np.diag(a))
    order = np.argsort(-evals, kind="stable")
    return evals[order], v[:, order]


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every particle not in ``keep`` (1-indexed), preserving order.

    ``keep`` must be a non-empty strict subset of {1, ..., N}.
    """
    n = rho.n
    keep = sorted(set(keep))
    if not keep or len(keep) >= n or any(p < 1 or p > n for p in keep):
        raise BadSubset(f"keep={keep} is not a non-empty strict subset of 1..{n}")
    mat = rho.matrix.reshape([2] * (2 * n))
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = [letters[i] if (i + 1) not in keep else letters[n + i] for i in range(n)]
    out = "".join(row[p - 1] for p in keep) + "".join(col[p - 1] for p in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, mat)
    dim = 2 ** len(keep)
    return DensityMatrix(len(keep), reduced.reshape(dim, dim))
