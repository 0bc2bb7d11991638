"""Piecewise-constant evolution of a schedule under H_e with real pulses."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .operators import (
    Axis,
    as_axis,
    expm_hermitian,
    deficit_log,
    pauli,
    pure_state_deficit,
    reduced_state,
    unitarity_error,
)
from .sequence import FreeInterval, Pulse, Schedule, pulse_count
from .spin_bath import SpinBathParams, build_he, random_product_state

JITTER_MODES = ("none", "random", "systematic")
EVOLVE_UNITARY_TOL = 1e-9


class NumericalError(RuntimeError):
    """A propagator drifted from unitarity beyond tolerance."""


@dataclass(frozen=True)
class JitterSpec:
    mode: str = "none"
    fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in JITTER_MODES:
            raise ValueError(f"jitter mode must be one of {JITTER_MODES}")
        if self.fraction < 0:
            raise ValueError("jitter fraction must be >= 0")

    @property
    def active(self) -> bool:
        return self.mode != "none" and self.fraction > 0


@dataclass(frozen=True)
class PulseConfig:
    delta: float = 0.0
    include_he_during_pulse: bool = True
    jitter: JitterSpec = field(default_factory=JitterSpec)

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("pulse width must be >= 0")

    @property
    def h(self) -> float:
        """Pulse amplitude giving area pi/2, i.e. exp(-i pi/2 sigma) = -i sigma.

        For ideal (zero-width) pulses the amplitude is taken as 1 so that the
        jitter fraction is relative to a unit-norm generator.
        """
        return np.pi / (2 * self.delta) if self.delta > 0 else 1.0


def sample_jitter(spec: JitterSpec, axis, slot: int, h: float = 1.0) -> np.ndarray:
    """Additive pulse error W = |w| h (n . sigma) with n uniform on the sphere.

    Systematic jitter draws one direction per pulse axis for the whole run;
    random jitter draws a fresh direction for every jitter slot.
    """
    if spec.mode == "none":
        raise ValueError("cannot sample jitter with mode 'none'")
    axis = as_axis(axis)
    if spec.mode == "systematic":
        entropy = [int(spec.seed), 0, axis.index]
    else:
        entropy = [int(spec.seed), 1, int(slot)]
    rng = np.random.default_rng(np.random.SeedSequence(entropy))
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    w = v[0] * pauli(Axis.X) + v[1] * pauli(Axis.Y) + v[2] * pauli(Axis.Z)
    return spec.fraction * h * w


def _system_op(op2: np.ndarray, dim: int) -> np.ndarray:
    return np.kron(op2, np.eye(dim // 2, dtype=complex))


def pulse_unitary(axis, cfg: PulseConfig, he: np.ndarray, slot: int = 0) -> np.ndarray:
    """Propagator of one rectangular pulse, including jitter and (optionally) H_e."""
    axis = as_axis(axis)
    if axis is Axis.I:
        raise ValueError("identity is not a pulse")
    dim = he.shape[0]
    h = cfg.h
    gen2 = h * pauli(axis)
    if cfg.jitter.active:
        gen2 = gen2 + sample_jitter(cfg.jitter, axis, slot, h)
    if cfg.delta == 0:
        # instantaneous rotation with area pi/2 on the (jittered) generator
        return _system_op(expm_hermitian(gen2, np.pi / 2), dim)
    if cfg.include_he_during_pulse:
        return expm_hermitian(_system_op(gen2, dim) + he, cfg.delta)
    return _system_op(expm_hermitian(gen2, cfg.delta), dim)


def _segments(s: Schedule, he: np.ndarray, cfg: PulseConfig):
    """Yield each event's unitary in time order, reusing repeated ones."""
    free: dict[float, np.ndarray] = {}
    pulses: dict = {}
    per_slot = cfg.jitter.active and cfg.jitter.mode == "random"
    for e in s.events:
        if isinstance(e, FreeInterval):
            if e.duration not in free:
                free[e.duration] = expm_hermitian(he, e.duration)
            yield free[e.duration]
        elif isinstance(e, Pulse):
            c = cfg if e.duration == cfg.delta else PulseConfig(e.duration, cfg.include_he_during_pulse, cfg.jitter)
            key = (e.axis, e.duration, e.jitter_slot if per_slot else None)
            if key not in pulses:
                u = pulse_unitary(e.axis, c, he, e.jitter_slot)
                if per_slot:
                    yield u
                    continue
                pulses[key] = u
            yield pulses[key]
        else:
            raise TypeError(f"unknown schedule event {e!r}")


def evolve(s: Schedule, he: np.ndarray, cfg: PulseConfig | None = None) -> np.ndarray:
    """Total propagator of ``s`` (later events multiply from the left)."""
    cfg = cfg or PulseConfig()
    he = np.asarray(he, dtype=complex)
    if he.ndim != 2 or he.shape[0] != he.shape[1] or he.shape[0] % 2:
        raise ValueError(f"H_e has incompatible shape {he.shape}")
    u = np.eye(he.shape[0], dtype=complex)
    for seg in _segments(s, he, cfg):
        u = seg @ u
    err = unitarity_error(u)
    if err > EVOLVE_UNITARY_TOL:
        raise NumericalError(f"total propagator not unitary (deviation {err:.3g})")
    return u


def evolve_state(s: Schedule, he: np.ndarray, psi: np.ndarray, cfg: PulseConfig | None = None) -> np.ndarray:
    cfg = cfg or PulseConfig()
    he = np.asarray(he, dtype=complex)
    if he.shape[0] != psi.size:
        raise ValueError("state and H_e dimensions differ")
    for seg in _segments(s, he, cfg):
        psi = seg @ psi
    if abs(np.linalg.norm(psi) - 1) > EVOLVE_UNITARY_TOL * max(1, len(s)):
        raise NumericalError("state norm drifted during evolution")
    return psi


@dataclass(frozen=True)
class TrialRecord:
    scheme: str
    n: int
    N_pulses: int
    tau0: float
    delta: float
    jT: float
    jitter_mode: str
    jitter_fraction: float
    seed: int
    l: float
    purity: float
    fidelity: float
    K: int = 0
    omega_S_T: float = 0.0
    omega_B_T: float = 0.0
    lambda_d: float = 0.0
    T_total: float = 1.0
    sweep_index: int = 0
    realization: int = 0
    wall_time_ms: float = 0.0


def run_trial(
    params: SpinBathParams,
    s: Schedule,
    cfg: PulseConfig,
    state_seed,
    seed: int | None = None,
) -> TrialRecord:
    """Evolve a random product state and score the system qubit's purity.

    ``fidelity`` is the overlap of the final reduced system state with the
    initial system state, i.e. relative to evolution that leaves the qubit
    untouched and only evolves the bath.
    """
    t0 = time.perf_counter()
    he = build_he(params)
    psi0 = random_product_state(params.K, state_seed)
    psi = evolve_state(s, he, psi0, cfg)
    psi = psi / np.linalg.norm(psi)
    deficit = pure_state_deficit(psi)
    rho_s = reduced_state(psi)
    rho_s0 = reduced_state(psi0)
    # rho_s0 is pure, so its principal eigenvector is the initial qubit state
    w, v = np.linalg.eigh(rho_s0)
    phi = v[:, np.argmax(w)]
    fid = float(np.real(phi.conj() @ rho_s @ phi))
    T = sum(e.duration for e in s.free_intervals)
    return TrialRecord(
        scheme=s.scheme,
        n=s.level,
        N_pulses=pulse_count(s),
        tau0=s.tau0,
        delta=cfg.delta,
        jT=params.j * T,
        jitter_mode=cfg.jitter.mode,
        jitter_fraction=cfg.jitter.fraction,
        seed=int(seed if seed is not None else cfg.jitter.seed),
        l=deficit_log(deficit),
        purity=1.0 - deficit,
        fidelity=min(1.0, max(0.0, fid)),
        K=params.K,
        omega_S_T=params.omega_S * T,
        omega_B_T=params.omega_B * T,
        lambda_d=params.lambda_d,
        T_total=T,
        wall_time_ms=(time.perf_counter() - t0) * 1e3,
    )
