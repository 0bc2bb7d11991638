"""Qubit + Heisenberg spin-chain environment Hamiltonian.

Site 1 is the system qubit at one end of a uniformly spaced chain; sites
2..K+1 are bath spins. All pairs interact with ``j * exp(-lambda_d * |a - b|)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import Axis, embed, pauli, pauli_string

MAX_SPINS = 12


@dataclass(frozen=True)
class SpinBathParams:
    omega_S: float = 2.0
    omega_B: float = 1.0
    j: float = 0.2
    lambda_d: float = 0.7
    K: int = 2

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ValueError("K (number of bath spins) must be a positive integer")
        if self.j < 0:
            raise ValueError("coupling j must be nonnegative")
        if not all(np.isfinite([self.omega_S, self.omega_B, self.j, self.lambda_d])):
            raise ValueError("model parameters must be finite")

    @property
    def n_spins(self) -> int:
        return self.K + 1

    def coupling(self, a: int, b: int) -> float:
        return self.j * np.exp(-self.lambda_d * abs(a - b))


class DimensionOverflowError(ValueError):
    pass


def he_terms(p: SpinBathParams) -> list[tuple[float, np.ndarray]]:
    """H_e as (coefficient, Pauli string) pairs, every string squaring to I."""
    s = p.n_spins
    terms = [(p.omega_S, pauli_string({1: Axis.Z}, s))]
    terms += [(p.omega_B, pauli_string({a: Axis.Z}, s)) for a in range(2, s + 1)]
    if p.j != 0:
        for a in range(2, s + 1):
            for b in range(1, a):
                jab = p.coupling(a, b)
                for ax in (Axis.X, Axis.Y, Axis.Z):
                    terms.append((jab, pauli_string({a: ax, b: ax}, s)))
    return terms


def build_he(p: SpinBathParams) -> np.ndarray:
    s = p.n_spins
    if s > MAX_SPINS:
        raise DimensionOverflowError(f"{s} spins exceeds the {MAX_SPINS}-spin limit")
    h = p.omega_S * embed(pauli(Axis.Z), 1, s)
    for a in range(2, s + 1):
        h = h + p.omega_B * embed(pauli(Axis.Z), a, s)
    for a in range(2, s + 1):
        for b in range(1, a):
            jab = p.coupling(a, b)
            if jab == 0:
                continue
            for ax in (Axis.X, Axis.Y, Axis.Z):
                h = h + jab * embed(pauli(ax), a, s) @ embed(pauli(ax), b, s)
    return h


def haar_qubit(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return v / np.linalg.norm(v)


def random_product_state(K: int, seed) -> np.ndarray:
    """Product of K+1 Haar-random qubit states; deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    psi = np.ones(1, dtype=complex)
    for _ in range(K + 1):
        psi = np.kron(psi, haar_qubit(rng))
    return psi / np.linalg.norm(psi)
