"""Seeded parameter sweeps, figure presets, config files and CSV output."""

from __future__ import annotations

import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .propagation import JITTER_MODES, JitterSpec, PulseConfig, TrialRecord, run_trial
from .sequence import build_schedule
from .spin_bath import SpinBathParams

SCHEMES = ("CDD", "PDD", "FREE")
CONFIG_KEYS = (
    "omega_S_T", "omega_B_T", "lambda_d", "j_T", "K", "scheme", "n", "delta_over_T",
    "jitter_mode", "jitter_fraction", "sweep_variable", "sweep_values", "realizations",
    "master_seed", "T_total",
)
SWEEPABLE = (
    "omega_S_T", "omega_B_T", "lambda_d", "j_T", "K", "scheme", "n", "delta_over_T",
    "jitter_mode", "jitter_fraction",
)
CSV_COLUMNS = (
    "scheme", "n", "N_pulses", "tau0", "delta", "jT", "jitter_mode", "jitter_fraction",
    "sweep_index", "realization", "seed", "l", "purity", "fidelity", "wall_time_ms",
)
_INT_KEYS = {"K", "n", "realizations", "master_seed"}
_STR_KEYS = {"scheme", "jitter_mode"}
MASK64 = (1 << 64) - 1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment; frequencies are given in units of 1/T_total."""

    omega_S_T: float = 2.0
    omega_B_T: float = 1.0
    lambda_d: float = 0.7
    j_T: float = 0.2
    K: int = 2
    scheme: str = "CDD"
    n: int = 4
    delta_over_T: float = 0.0
    jitter_mode: str = "none"
    jitter_fraction: float = 0.0
    sweep_variable: tuple = ()
    sweep_values: tuple = ()
    realizations: int = 1
    master_seed: int = 0
    T_total: float = 1.0
    include_he_during_pulse: bool = True

    def __post_init__(self):
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if self.T_total <= 0:
            raise ConfigError("T_total must be positive")
        if self.scheme.upper() not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}")
        if self.jitter_mode not in JITTER_MODES:
            raise ConfigError(f"jitter_mode must be one of {JITTER_MODES}")
        if len(self.sweep_variable) != len(self.sweep_values):
            raise ConfigError("each sweep variable needs its own value list")
        for name, vals in zip(self.sweep_variable, self.sweep_values):
            if name not in SWEEPABLE:
                raise ConfigError(f"cannot sweep {name!r}")
            if len(vals) == 0:
                raise ConfigError(f"empty grid for {name!r}")

    @property
    def model(self) -> SpinBathParams:
        T = self.T_total
        return SpinBathParams(self.omega_S_T / T, self.omega_B_T / T, self.j_T / T, self.lambda_d, self.K)

    @property
    def tau0(self) -> float:
        return self.T_total / 4**self.n

    @property
    def delta(self) -> float:
        return self.delta_over_T * self.T_total

    def points(self) -> list["ExperimentConfig"]:
        """Grid points in row-major order (last sweep variable fastest)."""
        if not self.sweep_variable:
            return [self]
        base = replace(self, sweep_variable=(), sweep_values=())
        return [
            replace(base, **dict(zip(self.sweep_variable, combo)))
            for combo in itertools.product(*self.sweep_values)
        ]

    def pulse_config(self, jitter_seed: int) -> PulseConfig:
        jit = JitterSpec(self.jitter_mode, self.jitter_fraction, jitter_seed)
        return PulseConfig(self.delta, self.include_he_during_pulse, jit)


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, sweep_index: int, realization: int) -> int:
    """splitmix64(splitmix64(splitmix64(master) ^ sweep_index) ^ realization)."""
    s = splitmix64(master_seed & MASK64)
    s = splitmix64(s ^ sweep_index)
    return splitmix64(s ^ realization)


def _run_task(task) -> TrialRecord:
    point, sweep_index, realization, seed = task
    sched = build_schedule(point.scheme, point.n, point.tau0, point.delta)
    # jitter and initial state draw from independent streams of the trial seed
    rec = run_trial(point.model, sched, point.pulse_config(seed), [seed, 2], seed=seed)
    return replace(rec, sweep_index=sweep_index, realization=realization)


def tasks(cfg: ExperimentConfig):
    for i, point in enumerate(cfg.points()):
        for r in range(cfg.realizations):
            yield point, i, r, trial_seed(cfg.master_seed, i, r)


def run_sweep(cfg: ExperimentConfig, workers: int = 1, progress=None) -> list[TrialRecord]:
    """One record per (grid point, realization), sorted by (sweep_index, realization)."""
    todo = list(tasks(cfg))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_task, todo, chunksize=max(1, len(todo) // (8 * workers))))
    else:
        records = []
        for t in todo:
            records.append(_run_task(t))
            if progress is not None and t[2] == cfg.realizations - 1:
                progress(t[1], records[-cfg.realizations:])
    records.sort(key=lambda r: (r.sweep_index, r.realization))
    return records


def summarize(records) -> list[dict]:
    """Per-sweep-point statistics of l (mean in log space plus the linear-space mean)."""
    records = list(records)
    if not records:
        raise ValueError("no records to summarize")
    groups: dict[int, list[TrialRecord]] = {}
    for r in records:
        groups.setdefault(r.sweep_index, []).append(r)
    out = []
    for idx in sorted(groups):
        rs = groups[idx]
        ls = np.array([r.l for r in rs])
        deficits = np.array([1 - r.purity for r in rs])
        first = rs[0]
        mean_deficit = float(deficits.mean())
        out.append({
            "sweep_index": idx,
            "scheme": first.scheme,
            "n": first.n,
            "jT": first.jT,
            "jitter_mode": first.jitter_mode,
            "jitter_fraction": first.jitter_fraction,
            "delta": first.delta,
            "K": first.K,
            "count": len(rs),
            "mean_l": float(ls.mean()),
            "stderr_l": float(ls.std(ddof=1) / math.sqrt(len(rs))) if len(rs) > 1 else 0.0,
            "min_l": float(ls.min()),
            "max_l": float(ls.max()),
            "mean_deficit": mean_deficit,
            "l_of_mean": math.log10(max(mean_deficit, 1e-16)),
        })
    return out


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def records_to_csv(records, timing: bool = False) -> str:
    """CSV text; ``wall_time_ms`` is left blank unless ``timing`` so output stays reproducible."""
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for r in records:
        row = asdict(r)
        cells = []
        for c in CSV_COLUMNS:
            if c == "wall_time_ms" and not timing:
                cells.append("")
            else:
                cells.append(_fmt(row[c]))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def summary_to_csv(summary: list[dict]) -> str:
    if not summary:
        return ""
    cols = list(summary[0])
    lines = [",".join(cols)]
    lines += [",".join(_fmt(s[c]) for c in cols) for s in summary]
    return "\n".join(lines) + "\n"


def _parse_scalar(key: str, text: str):
    text = text.strip()
    try:
        if key in _INT_KEYS:
            return int(text)
        if key in _STR_KEYS:
            return text.upper() if key == "scheme" else text.lower()
        return float(text)
    except ValueError as e:
        raise ConfigError(f"bad value for {key}: {text!r}") from e


def loads_config(text: str) -> ExperimentConfig:
    """Parse the flat ``key = value`` format (``#`` starts a comment).

    Several sweep variables may be given as ``sweep_variable = scheme, jitter_fraction``
    with ``sweep_values`` groups separated by ``;``.
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    kwargs = {}
    for key, value in raw.items():
        if key in ("sweep_variable", "sweep_values"):
            continue
        kwargs[key] = _parse_scalar(key, value)

    names = tuple(v.strip() for v in raw.get("sweep_variable", "").split(",") if v.strip())
    if names == ("none",):
        names = ()
    groups = [g for g in raw.get("sweep_values", "").split(";")] if names else []
    if names and len(groups) != len(names):
        raise ConfigError("sweep_values needs one ';'-separated group per sweep variable")
    values = []
    for name, group in zip(names, groups):
        if name not in SWEEPABLE:
            raise ConfigError(f"cannot sweep {name!r}")
        values.append(tuple(_parse_scalar(name, v) for v in group.split(",") if v.strip()))
    kwargs["sweep_variable"] = names
    kwargs["sweep_values"] = tuple(values)
    try:
        return ExperimentConfig(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as f:
        return loads_config(f.read())


def dumps_config(cfg: ExperimentConfig) -> str:
    lines = []
    for key in CONFIG_KEYS:
        if key == "sweep_variable":
            lines.append(f"sweep_variable = {', '.join(cfg.sweep_variable) or 'none'}")
        elif key == "sweep_values":
            if cfg.sweep_values:
                groups = ("; ".join(", ".join(_fmt(v) for v in vals) for vals in cfg.sweep_values))
                lines.append(f"sweep_values = {groups}")
        else:
            lines.append(f"{key} = {_fmt(getattr(cfg, key))}")
    return "\n".join(lines) + "\n"


def _grid(lo, hi, num):
    return tuple(float(v) for v in np.round(np.linspace(lo, hi, num), 12))


PRESETS = {
    # K=2, j = 0.2/T, delta = 1e-5 T, 90 random-jitter realizations
    "fig1_left": lambda: ExperimentConfig(
        j_T=0.2, K=2, n=4, delta_over_T=1e-5, jitter_mode="random",
        sweep_variable=("scheme", "jitter_fraction"),
        sweep_values=(SCHEMES, _grid(0, 0.15, 16)),
        realizations=90, master_seed=1,
    ),
    "fig1_right": lambda: ExperimentConfig(
        j_T=0.2, K=2, scheme="CDD", delta_over_T=1e-5, jitter_mode="random",
        sweep_variable=("n", "jitter_fraction"),
        sweep_values=((1, 2, 3, 4, 5), _grid(0, 0.15, 16)),
        realizations=90, master_seed=2,
    ),
    # K=5, delta = 1e-4 T, no jitter
    "fig2": lambda: ExperimentConfig(
        K=5, n=4, delta_over_T=1e-4,
        sweep_variable=("scheme", "j_T"),
        sweep_values=(("CDD", "PDD"), (0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.5, 15.0)),
        realizations=10, master_seed=3,
    ),
    # K=5, jT = 15, delta = 1e-4 T, systematic jitter
    "fig3_left": lambda: ExperimentConfig(
        j_T=15.0, K=5, scheme="CDD", delta_over_T=1e-4, jitter_mode="systematic",
        sweep_variable=("n", "jitter_fraction"),
        sweep_values=((1, 2, 3, 4, 5), _grid(0, 0.30, 16)),
        realizations=80, master_seed=4,
    ),
    # n = 5, K = 5, j tau0 = 3.0 -> jT = 3 * 4**5, delta = 1e-5 T
    "fig3_right": lambda: ExperimentConfig(
        j_T=3.0 * 4**5, K=5, n=5, delta_over_T=1e-5, jitter_mode="systematic",
        sweep_variable=("scheme", "jitter_fraction"),
        sweep_values=(SCHEMES, _grid(0, 0.30, 16)),
        realizations=80, master_seed=5,
    ),
}


def preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def select(cfg: ExperimentConfig, **fixed) -> ExperimentConfig:
    """Restrict a sweep variable to a subset of its grid, e.g. ``select(cfg, scheme=("CDD",))``."""
    names = list(cfg.sweep_variable)
    values = list(cfg.sweep_values)
    for k, keep in fixed.items():
        if k not in names:
            raise ConfigError(f"{k!r} is not swept")
        values[names.index(k)] = tuple(keep)
    return replace(cfg, sweep_values=tuple(values))
