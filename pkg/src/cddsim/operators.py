"""Dense operator algebra for few-spin Hilbert spaces.

Operators are plain complex numpy arrays. Basis ordering is lexicographic
with site 1 (the system qubit) as the most significant qubit, so
``embed(Z, 2, 2) == diag(1, -1, 1, -1)``.
"""

from __future__ import annotations

from enum import Enum
from functools import reduce

import numpy as np

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
DENSITY_TOL = 1e-10
PURITY_FLOOR = 1e-16


class Axis(str, Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"

    @property
    def index(self) -> int:
        return "IXYZ".index(self.value)


_PAULI = {
    Axis.I: np.array([[1, 0], [0, 1]], dtype=complex),
    Axis.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Axis.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Axis.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}
for _m in _PAULI.values():
    _m.setflags(write=False)

# sigma_a sigma_b = delta_ab I + i eps_abc sigma_c
_CYCLIC = {(Axis.X, Axis.Y): Axis.Z, (Axis.Y, Axis.Z): Axis.X, (Axis.Z, Axis.X): Axis.Y}


class NotHermitianError(ValueError):
    pass


class InvalidStateError(ValueError):
    pass


def as_axis(a) -> Axis:
    return a if isinstance(a, Axis) else Axis(str(a).upper())


def pauli(axis) -> np.ndarray:
    """Return the 2x2 Pauli matrix for ``axis`` (a copy, safe to mutate)."""
    return _PAULI[as_axis(axis)].copy()


def pauli_product(a, b) -> tuple[Axis, complex]:
    """Multiply two Pauli axes projectively.

    Returns ``(axis, phase)`` with ``pauli(a) @ pauli(b) == phase * pauli(axis)``.
    """
    a, b = as_axis(a), as_axis(b)
    if a is Axis.I:
        return b, 1 + 0j
    if b is Axis.I:
        return a, 1 + 0j
    if a is b:
        return Axis.I, 1 + 0j
    if (a, b) in _CYCLIC:
        return _CYCLIC[(a, b)], 1j
    return _CYCLIC[(b, a)], -1j


def embed(op: np.ndarray, site: int, total_spins: int) -> np.ndarray:
    """Place a single-spin operator at ``site`` (1-based) of ``total_spins``."""
    if not 1 <= site <= total_spins:
        raise IndexError(f"site {site} outside 1..{total_spins}")
    left = np.eye(2 ** (site - 1), dtype=complex)
    right = np.eye(2 ** (total_spins - site), dtype=complex)
    return np.kron(np.kron(left, np.asarray(op, dtype=complex)), right)


def pauli_string(axes, total_spins: int | None = None) -> np.ndarray:
    """Tensor product of Paulis; ``axes`` maps site -> axis or is a sequence."""
    if isinstance(axes, dict):
        if total_spins is None:
            total_spins = max(axes)
        factors = [_PAULI[as_axis(axes.get(s, Axis.I))] for s in range(1, total_spins + 1)]
    else:
        factors = [_PAULI[as_axis(a)] for a in axes]
    return reduce(np.kron, factors)


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def hermiticity_error(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - dagger(h)))) if h.size else 0.0


def unitarity_error(u: np.ndarray) -> float:
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))))


def expm_hermitian(h: np.ndarray, t: float, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """exp(-i h t) for Hermitian ``h`` via eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    err = hermiticity_error(h)
    if err > tol * max(1.0, float(np.max(np.abs(h)))):
        raise NotHermitianError(f"generator not Hermitian (max |H - H^+| = {err:.3g})")
    if t == 0:
        return np.eye(h.shape[0], dtype=complex)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * t * w)) @ dagger(v)


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def _check_density(rho: np.ndarray) -> None:
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError("density matrix must be square")
    if hermiticity_error(rho) > DENSITY_TOL:
        raise InvalidStateError("density matrix not Hermitian")
    if abs(np.trace(rho) - 1) > DENSITY_TOL:
        raise InvalidStateError(f"density matrix trace {np.trace(rho).real:.12g} != 1")
    if np.linalg.eigvalsh(rho).min() < -DENSITY_TOL:
        raise InvalidStateError("density matrix not positive semidefinite")


def partial_trace_bath(rho: np.ndarray, system_site: int = 1) -> np.ndarray:
    """Reduce a density matrix on S spins to the 2x2 state of ``system_site``."""
    rho = np.asarray(rho, dtype=complex)
    _check_density(rho)
    n = int(round(np.log2(rho.shape[0])))
    if 2**n != rho.shape[0]:
        raise InvalidStateError("dimension is not a power of two")
    t = rho.reshape([2] * (2 * n))
    k = system_site - 1
    # move the system row/column indices to the front, flatten the rest
    t = np.moveaxis(t, [k, n + k], [0, 1]).reshape(2, 2, 2 ** (n - 1), 2 ** (n - 1))
    return np.einsum("abkk->ab", t)


def reduced_state(psi: np.ndarray, system_site: int = 1) -> np.ndarray:
    """Reduced system density matrix directly from a pure state vector."""
    psi = np.asarray(psi, dtype=complex)
    n = int(round(np.log2(psi.size)))
    m = np.moveaxis(psi.reshape([2] * n), system_site - 1, 0).reshape(2, -1)
    return m @ dagger(m)


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def purity_deficit(rho_s: np.ndarray) -> float:
    """1 - Tr rho^2 of a normalized state; for 2x2 input computed as 2 det(rho).

    The determinant form avoids the cancellation in 1 - Tr rho^2 near purity 1.
    """
    rho_s = np.asarray(rho_s, dtype=complex)
    tr = np.real(np.trace(rho_s))
    if rho_s.shape == (2, 2):
        det = np.real(rho_s[0, 0] * rho_s[1, 1]) - abs(rho_s[0, 1] * rho_s[1, 0])
        return float(2 * det / tr**2)
    return float(1 - purity(rho_s) / tr**2)


def pure_state_deficit(psi: np.ndarray, system_site: int = 1) -> float:
    """1 - Tr rho_S^2 for the qubit at ``system_site`` of a pure joint state.

    Uses 2 det(M M^+) as the sum of squared 2x2 minors of the 2 x D coefficient
    matrix M, which keeps full relative accuracy for nearly pure rho_S.
    """
    psi = np.asarray(psi, dtype=complex)
    n = int(round(np.log2(psi.size)))
    m = np.moveaxis(psi.reshape([2] * n), system_site - 1, 0).reshape(2, -1)
    a = np.outer(m[0], m[1])
    minors = a - a.T
    norm2 = np.vdot(psi, psi).real
    return float(np.sum(np.abs(minors) ** 2) / norm2**2)


def purity_deficit_log(rho_s: np.ndarray, floor: float = PURITY_FLOOR) -> float:
    """l = log10(1 - Tr rho^2), floored so refocused states stay finite."""
    return deficit_log(purity_deficit(rho_s), floor)


def deficit_log(deficit: float, floor: float = PURITY_FLOOR) -> float:
    return float(np.log10(max(deficit, floor)))
