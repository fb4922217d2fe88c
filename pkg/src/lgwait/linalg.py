"""Small dense complex linear algebra for one qubit and qubit+ancilla.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` with shape
(2, 2) or (4, 4).  Composite operators are ordered system ⊗ ancilla, so the
composite basis index is ``2 * system + ancilla``.

:func:`mat_exp` is a self-contained scaling-and-squaring Taylor exponential.
It is deliberately independent of the closed-form propagators in
:mod:`lgwait.detector` so that it can serve as a check on them.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidStateError, NonFiniteError

STRUCT_TOL = 1e-12
ORACLE_TOL = 1e-10

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

#: |0><1| + |1><0| on the ancilla
FLIP = np.array([[0, 1], [1, 0]], dtype=complex)


def identity(dim: int = 2) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def pauli(axis: str) -> np.ndarray:
    """Return the Pauli matrix for ``axis`` in {'x', 'y', 'z'}."""
    try:
        return _PAULI[axis.lower()].copy()
    except (KeyError, AttributeError):
        raise ValueError(f"unknown Pauli axis {axis!r}") from None


def dag(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product ``a ⊗ b`` (system first, ancilla second)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def is_hermitian(m: np.ndarray, tol: float = STRUCT_TOL) -> bool:
    return bool(np.max(np.abs(m - dag(m))) <= tol)


def is_unitary(u: np.ndarray, tol: float = STRUCT_TOL) -> bool:
    return unitarity_residual(u) <= tol


def unitarity_residual(u: np.ndarray) -> float:
    """Largest elementwise deviation of ``U†U`` from the identity."""
    return float(np.max(np.abs(dag(u) @ u - np.eye(u.shape[0]))))


def _check_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape not in ((2, 2), (4, 4)):
        raise ValueError(f"expected a 2x2 or 4x4 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError("matrix has non-finite entries")
    return m


def mat_exp(m: np.ndarray, s: float) -> np.ndarray:
    """Compute ``exp(-i s M)`` by scaling and squaring a Taylor series.

    The argument is scaled by ``2**-k`` so that its 1-norm is at most 0.5,
    the series is summed until a term drops below 1e-16 in norm, and the
    result is squared ``k`` times.

    Parameters
    ----------
    m : ndarray
        2x2 or 4x4 complex matrix, usually a Hamiltonian.
    s : float
        Time (or any real scale) multiplying ``-i M``.
    """
    m = _check_square(m)
    if not math.isfinite(s):
        raise NonFiniteError("scale factor is not finite")
    a = -1j * s * m
    norm = float(np.max(np.sum(np.abs(a), axis=0)))
    k = 0
    if norm > 0.5:
        k = int(math.ceil(math.log2(norm / 0.5)))
    a = a / (2.0**k)

    dim = a.shape[0]
    result = np.eye(dim, dtype=complex)
    term = np.eye(dim, dtype=complex)
    for n in range(1, 64):
        term = term @ a / n
        result = result + term
        if np.max(np.sum(np.abs(term), axis=0)) < 1e-16:
            break
    for _ in range(k):
        result = result @ result
    return result


def pure_state(amplitudes, tol: float = 1e-9) -> np.ndarray:
    """Validate a qubit state vector and return it as a complex array.

    Raises :class:`InvalidStateError` unless the vector has two entries and
    unit norm within ``tol``.
    """
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if psi.shape != (2,):
        raise InvalidStateError(f"qubit state needs 2 amplitudes, got {psi.shape}")
    if not np.all(np.isfinite(psi)):
        raise InvalidStateError("state has non-finite amplitudes")
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1.0) > tol:
        raise InvalidStateError(f"state is not normalized (norm^2 = {norm!r})")
    return psi


def eigenstate(axis: str, sign: int = +1) -> np.ndarray:
    """Eigenvector of the Pauli matrix ``axis`` with eigenvalue ``sign``."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    vals, vecs = np.linalg.eigh(pauli(axis))
    return vecs[:, int(np.argmin(np.abs(vals - sign)))].astype(complex)


def random_pure_state(rng: np.random.Generator) -> np.ndarray:
    """Haar-random qubit state."""
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def density_matrix(rho, tol: float = STRUCT_TOL) -> np.ndarray:
    """Validate a 2x2 density matrix (Hermitian, unit trace, positive)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidStateError(f"density matrix must be 2x2, got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("density matrix has non-finite entries")
    if not is_hermitian(rho, tol):
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise InvalidStateError("density matrix does not have unit trace")
    if np.min(np.linalg.eigvalsh(rho)) < -tol:
        raise InvalidStateError("density matrix has a negative eigenvalue")
    return rho


def projector(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, psi.conj())


def expectation(psi: np.ndarray, op: np.ndarray) -> float:
    """Real part of ``<psi|op|psi>``."""
    return float(np.vdot(psi, op @ psi).real)
