"""Magnus-expansion analysis of concatenated vs periodic decoupling.

Write H_e = I (x) B0 + sum_a sigma_a (x) B_a. One level of the cycle
``f X f Z f X f Z`` maps the bath operators to second order in tau as

    B0 -> B0
    Bx -> i tau [B0, Bx]
    By -> (i tau / 2) ([B0, By] - i {Bx, Bz})
    Bz -> 0

and concatenation reapplies the map with tau_m = 4**m tau0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import Axis, anticommutator, commutator, dagger, pauli, spectral_norm

DEFAULT_THRESHOLD = 0.1


@dataclass(frozen=True)
class BathDecomposition:
    B0: np.ndarray
    Bx: np.ndarray
    By: np.ndarray
    Bz: np.ndarray
    tau0: float = 0.0

    @property
    def beta(self) -> float:
        return spectral_norm(self.B0)

    @property
    def J(self) -> float:
        return max(spectral_norm(self.Bx), spectral_norm(self.By), spectral_norm(self.Bz))

    @property
    def outside_assumptions(self) -> bool:
        """True when the bound derivation's J < beta assumption fails."""
        return not self.J < self.beta

    def coupling(self, axis) -> np.ndarray:
        return {"X": self.Bx, "Y": self.By, "Z": self.Bz}[Axis(axis).value]

    def reconstruct(self) -> np.ndarray:
        h = np.kron(pauli(Axis.I), self.B0)
        for ax, b in ((Axis.X, self.Bx), (Axis.Y, self.By), (Axis.Z, self.Bz)):
            h = h + np.kron(pauli(ax), b)
        return h


@dataclass(frozen=True)
class RecursionLevel:
    level: int
    tau: float
    B0: np.ndarray
    Bx: np.ndarray
    By: np.ndarray
    Bz: np.ndarray

    @property
    def h(self) -> float:
        """max(||Bx||, ||By||); at level 0 Bz is included as well."""
        norms = [spectral_norm(self.Bx), spectral_norm(self.By)]
        if self.level == 0:
            norms.append(spectral_norm(self.Bz))
        return max(norms)

    def effective_hamiltonian(self) -> np.ndarray:
        return BathDecomposition(self.B0, self.Bx, self.By, self.Bz).reconstruct()


def decompose(he: np.ndarray, K: int | None = None, tau0: float = 0.0) -> BathDecomposition:
    """Split H_e on 1 + K spins into the bath operators B0, Bx, By, Bz."""
    he = np.asarray(he, dtype=complex)
    d = he.shape[0]
    if K is not None and d != 2 ** (K + 1):
        raise ValueError(f"H_e dimension {d} does not match K={K}")
    if d % 2 or he.shape != (d, d):
        raise ValueError(f"H_e has incompatible shape {he.shape}")
    blocks = he.reshape(2, d // 2, 2, d // 2).transpose(0, 2, 1, 3)

    def part(ax):
        # (1/2) Tr_S[(sigma (x) I) H_e]
        s = pauli(ax)
        return 0.5 * np.einsum("ab,bakl->kl", s, blocks)

    return BathDecomposition(part(Axis.I), part(Axis.X), part(Axis.Y), part(Axis.Z), tau0)


def first_order_effective(h: np.ndarray, group) -> np.ndarray:
    """Group average (1/|G|) sum_g g^+ H g for system operators ``g``.

    ``group`` entries may be axes or 2x2 unitaries.
    """
    group = list(group)
    if not group:
        raise ValueError("group must be nonempty")
    h = np.asarray(h, dtype=complex)
    bath = np.eye(h.shape[0] // 2, dtype=complex)
    acc = np.zeros_like(h)
    for g in group:
        g2 = pauli(g) if not isinstance(g, np.ndarray) else g
        G = np.kron(g2, bath)
        acc += dagger(G) @ h @ G
    return acc / len(group)


def cdd_recursion(d: BathDecomposition, n: int, tau0: float | None = None) -> list[RecursionLevel]:
    """Second-order Magnus bath operators for levels 1..n (level 0 prepended)."""
    if n < 0:
        raise ValueError("level must be >= 0")
    tau0 = d.tau0 if tau0 is None else tau0
    levels = [RecursionLevel(0, tau0, d.B0, d.Bx, d.By, d.Bz)]
    b0 = d.B0
    zero = np.zeros_like(b0)
    if n >= 1:
        bx = 1j * tau0 * commutator(b0, d.Bx)
        by = 0.5j * tau0 * (commutator(b0, d.By) - 1j * anticommutator(d.Bx, d.Bz))
        levels.append(RecursionLevel(1, 4 * tau0, b0, bx, by, zero))
    for m in range(2, n + 1):
        prev = levels[-1]
        tau_prev = prev.tau
        bx = 1j * tau_prev * commutator(b0, prev.Bx)
        by = 0.5j * tau_prev * commutator(b0, prev.By)
        levels.append(RecursionLevel(m, 4**m * tau0, b0, bx, by, zero))
    return levels


def phi_cdd(beta: float, J: float, T: float, N: float, n: int) -> float:
    """Upper bound (beta T / sqrt(N))**n * J T on the CDD error phase."""
    if N < 1 or n < 1 or min(beta, J, T) < 0:
        raise ValueError("need beta, J, T >= 0, N >= 1, n >= 1")
    return (beta * T / math.sqrt(N)) ** n * (J * T)


def phi_pdd(beta: float, J: float, T: float, N: float) -> float:
    """PDD error phase 2 (beta T / N) (J T) = 2 (beta tau0)(J T)."""
    if N < 1 or min(beta, J, T) < 0:
        raise ValueError("need beta, J, T >= 0, N >= 1")
    return 2 * (beta * T / N) * (J * T)


def n_max(beta: float, tau0: float, c: float = 0.1) -> float:
    """Largest consistent concatenation level -log4(beta tau0 / c), unfloored.

    Values <= 0 mean even one level violates beta tau_n << 1.
    """
    if beta <= 0 or tau0 <= 0 or c <= 0:
        raise ValueError("beta, tau0 and c must be positive")
    return -math.log(beta * tau0 / c, 4)


def fidelity_ratio_bound(beta: float, tau0: float, c: float = 0.1) -> float:
    """Bound on (1 - f_CDD) / (1 - f_PDD) at the largest usable level."""
    if beta <= 0 or tau0 <= 0 or c <= 0:
        raise ValueError("beta, tau0 and c must be positive")
    x = beta * tau0
    exponent = -math.log(x / c, 4)
    return math.exp(exponent * math.log(c * x)) / (4 * x * x)


def finite_width_condition(c: float, d: float, tau_n: float, beta: float, delta: float) -> float:
    """Left-hand side c tau_n beta + d delta / tau_n; compare against a small threshold."""
    if tau_n <= 0:
        raise ValueError("tau_n must be positive")
    if min(c, d, beta, delta) < 0:
        raise ValueError("arguments must be nonnegative")
    return c * tau_n * beta + d * delta / tau_n


def fidelity_estimate(chain: list[RecursionLevel], n: int | None = None) -> float:
    """f_n ~ 1 - (tau_n h^(n))**2, clamped to [0, 1]."""
    lvl = chain[-1] if n is None else next(c for c in chain if c.level == n)
    return min(1.0, max(0.0, 1.0 - (lvl.tau * lvl.h) ** 2))


def bound_report(beta, J, T, N, n, c=1.0, d=1.0, delta=0.0, c_conv=0.1, threshold=DEFAULT_THRESHOLD) -> dict:
    """All analytic quantities for one parameter set, as used by the CLI.

    ``c_conv`` is the small constant in beta tau_n < c_conv used for n_max and
    the ratio bound; ``c`` and ``d`` are the finite-width factors.
    """
    tau0 = T / N
    tau_n = 4**n * tau0
    out = {
        "phi_cdd": phi_cdd(beta, J, T, N, n),
        "phi_pdd": phi_pdd(beta, J, T, N),
        "n_max": n_max(beta, tau0, c_conv) if beta > 0 else math.inf,
        "ratio_bound": fidelity_ratio_bound(beta, tau0, c_conv) if beta > 0 else 0.0,
        "finite_width_lhs": finite_width_condition(c, d, tau_n, beta, delta),
    }
    out["finite_width_ok"] = out["finite_width_lhs"] < threshold
    out["outside_assumptions"] = not J < beta
    return out
