"""Pulse schedules for periodic and concatenated decoupling.

A :class:`Schedule` stores events in *time* order (index 0 acts first). The
textbook notation ``p1 = f X f Z f X f Z`` is an operator product, so the
builders reverse it: in time, ``p1`` is ``Z f X f Z f X f``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .operators import Axis, as_axis, pauli_product


@dataclass(frozen=True)
class FreeInterval:
    duration: float

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("free interval duration must be positive")


@dataclass(frozen=True)
class Pulse:
    axis: Axis
    duration: float = 0.0
    jitter_slot: int = 0


@dataclass(frozen=True)
class Schedule:
    events: tuple = ()
    level: int = 0
    tau0: float = 1.0
    scheme: str = "CDD"

    @property
    def pulses(self) -> list[Pulse]:
        return [e for e in self.events if isinstance(e, Pulse)]

    @property
    def free_intervals(self) -> list[FreeInterval]:
        return [e for e in self.events if isinstance(e, FreeInterval)]

    def __len__(self):
        return len(self.events)


def _cycle_operator_order(generators):
    a, b = (as_axis(g) for g in generators)
    if a is b or Axis.I in (a, b):
        raise ValueError("generators must be two distinct non-identity Paulis")
    return a, b


def _cdd_time_order(n: int, a: Axis, b: Axis) -> list:
    # p_{m+1} = p_m a p_m b p_m a p_m b (operator order) -> time order b p_m a p_m b p_m a p_m
    seq = ["f"]
    for _ in range(n):
        seq = [b, *seq, a, *seq, b, *seq, a, *seq]
    return seq


def _materialize(tokens, tau0: float, delta: float) -> tuple:
    events = []
    slot = 0
    for t in tokens:
        if t == "f":
            events.append(FreeInterval(tau0))
        else:
            events.append(Pulse(t, delta, slot))
            slot += 1
    return tuple(events)


def build_cdd(n: int, tau0: float = 1.0, delta: float = 0.0, generators=("X", "Z")) -> Schedule:
    """Unsimplified level-``n`` concatenated sequence.

    ``generators=(a, b)`` gives ``p_{m+1} = p_m a p_m b p_m a p_m b``; any
    distinct pair of Paulis is allowed.
    """
    if n < 0:
        raise ValueError("concatenation level must be >= 0")
    a, b = _cycle_operator_order(generators)
    return Schedule(_materialize(_cdd_time_order(n, a, b), tau0, delta), n, tau0, "CDD")


def build_pdd(
    n_equiv: int, tau0: float = 1.0, delta: float = 0.0, generators=("X", "Z"), cycles: int | None = None
) -> Schedule:
    """The level-1 cycle repeated ``4**(n_equiv - 1)`` times.

    Same number of free intervals, and so the same duration, as ``build_cdd(n_equiv)``.
    ``cycles`` overrides the repetition count.
    """
    if n_equiv < 1:
        raise ValueError("PDD needs n_equiv >= 1")
    if cycles is None:
        cycles = 4 ** (n_equiv - 1)
    a, b = _cycle_operator_order(generators)
    cycle = _cdd_time_order(1, a, b)
    return Schedule(_materialize(cycle * cycles, tau0, delta), n_equiv, tau0, "PDD")


def build_free(n: int, tau0: float = 1.0) -> Schedule:
    """Pulse-free evolution over the same ``4**n`` intervals."""
    return Schedule(tuple(FreeInterval(tau0) for _ in range(4**n)), n, tau0, "FREE")


def simplify(s: Schedule) -> Schedule:
    """Merge runs of adjacent pulses with Pauli identities and drop identities.

    Global phases are discarded. Free intervals are never merged, and jitter
    slots are renumbered consecutively over the surviving pulses.
    """
    out: list = []
    pending: Axis | None = None
    width = 0.0
    for e in s.events:
        if isinstance(e, Pulse):
            # later pulse multiplies from the left
            pending = e.axis if pending is None else pauli_product(e.axis, pending)[0]
            width = e.duration
            continue
        if pending is not None and pending is not Axis.I:
            out.append(Pulse(pending, width))
        pending = None
        out.append(e)
    if pending is not None and pending is not Axis.I:
        out.append(Pulse(pending, width))

    slot = 0
    events = []
    for e in out:
        if isinstance(e, Pulse):
            e = replace(e, jitter_slot=slot)
            slot += 1
        events.append(e)
    return replace(s, events=tuple(events))


def pulse_count(s: Schedule) -> int:
    return sum(isinstance(e, Pulse) for e in s.events)


def ideal_duration(s: Schedule) -> float:
    return sum(e.duration for e in s.events)


def build_schedule(scheme: str, n: int, tau0: float, delta: float = 0.0, simplified: bool = True) -> Schedule:
    scheme = scheme.upper()
    if scheme == "CDD":
        s = build_cdd(n, tau0, delta)
        return simplify(s) if simplified else s
    if scheme == "PDD":
        return build_pdd(n, tau0, delta)
    if scheme == "FREE":
        return build_free(n, tau0)
    raise ValueError(f"unknown scheme {scheme!r}")


def dumps(s: Schedule) -> str:
    """Line format: ``F <duration>`` or ``P <axis> <duration> <jitter_slot>``."""
    lines = []
    for e in s.events:
        if isinstance(e, FreeInterval):
            lines.append(f"F {e.duration!r}")
        else:
            lines.append(f"P {e.axis.value} {e.duration!r} {e.jitter_slot}")
    return "\n".join(lines) + ("\n" if lines else "")


def loads(text: str, level: int = 0, scheme: str = "CDD") -> Schedule:
    events = []
    for raw in text.splitlines():
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "F" and len(parts) == 2:
            events.append(FreeInterval(float(parts[1])))
        elif parts[0] == "P" and len(parts) == 4:
            events.append(Pulse(as_axis(parts[1]), float(parts[2]), int(parts[3])))
        else:
            raise ValueError(f"bad schedule line: {raw!r}")
    tau0 = next((e.duration for e in events if isinstance(e, FreeInterval)), 1.0)
    return Schedule(tuple(events), level, tau0, scheme)
