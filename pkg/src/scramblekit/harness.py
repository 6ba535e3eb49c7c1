"""Seeded ensemble sweeps, config files and CSV output."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Optional, TextIO

import numpy as np

from .models import Model, build_schedule, layers_per_timestep
from .observables import PStarMode, RegionLayout, default_regions, pstar_indicator, tripartite_mi
from .rng import stream
from .tableau import InitState, Tableau, sample_product_axes

log = logging.getLogger(__name__)

OBSERVABLES = ("i3", "pstar", "gates")
CSV_COLUMNS = (
    "model", "N", "s", "t", "realizations", "seed",
    "i3_mean", "i3_sem", "pstar_mean", "pstar_sem", "gates_per_qubit_mean",
)
CONFIG_KEYS = (
    "model", "sizes", "exponents", "timesteps", "realizations",
    "seed", "init_state", "region_layout", "observables",
)
# optional keys beyond the core set
EXTRA_KEYS = ("pstar_region", "pstar_mode", "riffle_all_pairs")
COMPLETE_MARKER = "# complete"
BUDGET_TOLERANCE = 0.05
SCHEDULE_STREAM, INIT_STREAM = 0, 1


class ConfigError(ValueError):
    pass


def default_init(model: Model) -> InitState:
    return InitState.RANDOM_PRODUCT if model is Model.RIFFLE else InitState.Z_POLARIZED


@dataclass
class SweepConfig:
    model: Model
    sizes: list
    exponents: list
    timesteps: list = field(default_factory=lambda: [1])
    realizations: int = 1000
    seed: int = 0
    init_state: Optional[InitState] = None
    region_layout: Optional[RegionLayout] = None
    observables: tuple = OBSERVABLES
    pstar_region: str = "b"
    pstar_mode: PStarMode = PStarMode.PER_QUBIT
    riffle_all_pairs: bool = False

    def __post_init__(self):
        self.model = Model.parse(self.model)
        self.sizes = [int(n) for n in self.sizes]
        self.exponents = [float(s) for s in self.exponents]
        self.timesteps = [int(t) for t in self.timesteps]
        self.realizations = int(self.realizations)
        self.seed = int(self.seed)
        if self.init_state is not None:
            self.init_state = InitState.parse(self.init_state)
        if self.region_layout is not None:
            self.region_layout = RegionLayout.parse(self.region_layout)
        self.observables = tuple(o for o in OBSERVABLES if o in {str(v).strip().lower() for v in self.observables})
        self.pstar_mode = PStarMode(self.pstar_mode)
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if not self.exponents:
            raise ConfigError("exponent list is empty")
        if not self.sizes:
            raise ConfigError("size list is empty")
        if not self.timesteps or min(self.timesteps) < 1:
            raise ConfigError("timesteps must be >= 1")

    @property
    def init(self) -> InitState:
        return self.init_state or default_init(self.model)

    @classmethod
    def from_text(cls, text: str) -> "SweepConfig":
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in CONFIG_KEYS + EXTRA_KEYS:
                raise ConfigError(f"line {lineno}: unknown or malformed entry {line!r}")
            raw[key] = value.strip()
        missing = {"model", "sizes", "exponents"} - raw.keys()
        if missing:
            raise ConfigError(f"missing keys: {sorted(missing)}")
        split = lambda v: [x for x in v.replace(" ", "").split(",") if x]  # noqa: E731
        kwargs = {
            "model": raw["model"],
            "sizes": split(raw["sizes"]),
            "exponents": split(raw["exponents"]),
        }
        if "timesteps" in raw:
            kwargs["timesteps"] = split(raw["timesteps"])
        if "realizations" in raw:
            kwargs["realizations"] = raw["realizations"]
        if "seed" in raw:
            kwargs["seed"] = raw["seed"]
        for key in ("init_state", "region_layout"):
            if raw.get(key, "default").lower() != "default":
                kwargs[key] = raw[key]
        if "observables" in raw:
            obs = [o.lower() for o in split(raw["observables"])]
            bad = set(obs) - set(OBSERVABLES)
            if bad:
                raise ConfigError(f"unknown observables {sorted(bad)}")
            kwargs["observables"] = obs
        if "pstar_region" in raw:
            kwargs["pstar_region"] = raw["pstar_region"].lower()
        if "pstar_mode" in raw:
            kwargs["pstar_mode"] = raw["pstar_mode"].lower()
        if "riffle_all_pairs" in raw:
            flag = raw["riffle_all_pairs"].lower()
            if flag not in ("true", "false", "1", "0", "yes", "no"):
                raise ConfigError(f"riffle_all_pairs: expected a boolean, got {flag!r}")
            kwargs["riffle_all_pairs"] = flag in ("true", "1", "yes")
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "SweepConfig":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        lines = [
            f"model = {self.model.value}",
            f"sizes = {','.join(str(n) for n in self.sizes)}",
            f"exponents = {','.join(repr(s) for s in self.exponents)}",
            f"timesteps = {','.join(str(t) for t in self.timesteps)}",
            f"realizations = {self.realizations}",
            f"seed = {self.seed}",
            f"init_state = {self.init_state.value if self.init_state else 'default'}",
            f"region_layout = {self.region_layout.value if self.region_layout else 'default'}",
            f"observables = {','.join(self.observables)}",
        ]
        if self.pstar_region != "b":
            lines.append(f"pstar_region = {self.pstar_region}")
        if self.pstar_mode is not PStarMode.PER_QUBIT:
            lines.append(f"pstar_mode = {self.pstar_mode.value}")
        if self.riffle_all_pairs:
            lines.append("riffle_all_pairs = true")
        return "\n".join(lines) + "\n"


@dataclass
class SweepRecord:
    model: str
    N: int
    s: float
    t: int
    realizations: int
    seed: int
    i3_mean: float = math.nan
    i3_sem: float = math.nan
    pstar_mean: float = math.nan
    pstar_sem: float = math.nan
    gates_per_qubit_mean: float = math.nan
    error: Optional[str] = None

    @property
    def budget_ok(self) -> bool:
        return abs(self.gates_per_qubit_mean - 1.0) <= BUDGET_TOLERANCE


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def format_row(rec: SweepRecord) -> str:
    return ",".join(_fmt(getattr(rec, c)) for c in CSV_COLUMNS)


def _mean_sem(values: np.ndarray) -> tuple[float, float]:
    n = values.size
    mean = float(values.sum() / n)
    sem = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return mean, sem


def realization(cfg: SweepConfig, n: int, s_index: int, t: int, r: int):
    """One circuit sample; returns (I3 bits, P* indicator, gates per qubit per timestep)."""
    key = (cfg.model.code, n, s_index, t, r)
    opts = {"all_pairs": True} if cfg.riffle_all_pairs and cfg.model is Model.RIFFLE else {}
    sched = build_schedule(
        cfg.model, n, cfg.exponents[s_index], t, stream(cfg.seed, *key, SCHEDULE_STREAM), **opts
    )
    regions = default_regions(n, cfg.model, cfg.region_layout)
    i3 = math.nan
    if "i3" in cfg.observables:
        axes = sample_product_axes(n, cfg.init, stream(cfg.seed, *key, INIT_STREAM))
        tab = Tableau.product(axes)
        tab.run(sched)
        i3 = float(tripartite_mi(tab, regions))
    pstar = math.nan
    if "pstar" in cfg.observables:
        pstar = float(pstar_indicator(sched, getattr(regions, cfg.pstar_region), mode=cfg.pstar_mode))
    return i3, pstar, sched.gates_per_qubit()


def _point_values(args) -> np.ndarray:
    cfg, n, s_index, t, start, stop = args
    return np.array([realization(cfg, n, s_index, t, r) for r in range(start, stop)], dtype=float).reshape(-1, 3)


def _grid(cfg: SweepConfig):
    for n in cfg.sizes:
        for si in range(len(cfg.exponents)):
            for t in cfg.timesteps:
                yield n, si, t


def _record(cfg: SweepConfig, n: int, si: int, t: int, values: np.ndarray) -> SweepRecord:
    rec = SweepRecord(cfg.model.value, n, cfg.exponents[si], t, cfg.realizations, cfg.seed)
    if "i3" in cfg.observables:
        rec.i3_mean, rec.i3_sem = _mean_sem(values[:, 0])
    if "pstar" in cfg.observables:
        rec.pstar_mean, rec.pstar_sem = _mean_sem(values[:, 1])
    rec.gates_per_qubit_mean = float(values[:, 2].sum() / values.shape[0])
    if cfg.realizations >= 1000 and not rec.budget_ok:
        log.warning(
            "normalization fault: %s N=%d s=%g t=%d has %.4f gates/qubit/timestep",
            rec.model, n, rec.s, t, rec.gates_per_qubit_mean,
        )
    return rec


def _check_point(cfg: SweepConfig, n: int) -> None:
    layers_per_timestep(cfg.model, n)
    default_regions(n, cfg.model, cfg.region_layout)


def run_sweep(
    cfg: SweepConfig,
    out: Optional[TextIO] = None,
    workers: int = 1,
    chunk: int = 250,
) -> list[SweepRecord]:
    """Run every grid point; rows are streamed to ``out`` as they finish.

    Realizations are split into chunks that may run on separate processes;
    each realization draws from its own keyed stream and the per-point arrays
    are reassembled in realization order, so the output does not depend on
    ``workers``.
    """
    records = []
    if out is not None:
        out.write(",".join(CSV_COLUMNS) + "\n")
        out.flush()
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for n, si, t in _grid(cfg):
            try:
                _check_point(cfg, n)
            except ValueError as exc:
                rec = SweepRecord(cfg.model.value, n, cfg.exponents[si], t, cfg.realizations, cfg.seed, error=str(exc))
                log.error("skipping %s N=%d s=%g t=%d: %s", rec.model, n, rec.s, t, exc)
                records.append(rec)
                if out is not None:
                    out.write(f"# error: N={n},s={_fmt(rec.s)},t={t}: {exc}\n")
                continue
            jobs = [
                (cfg, n, si, t, a, min(a + chunk, cfg.realizations))
                for a in range(0, cfg.realizations, chunk)
            ]
            parts = list(pool.map(_point_values, jobs)) if pool else [_point_values(j) for j in jobs]
            rec = _record(cfg, n, si, t, np.vstack(parts))
            records.append(rec)
            if out is not None:
                out.write(format_row(rec) + "\n")
                out.flush()
    finally:
        if pool is not None:
            pool.shutdown()
    if out is not None:
        out.write("# entropy_unit = bits\n")
        out.write(COMPLETE_MARKER + "\n")
        out.flush()
    return records


def write_sweep(cfg: SweepConfig, path, workers: int = 1) -> list[SweepRecord]:
    with open(path, "w", newline="") as fh:
        return run_sweep(cfg, fh, workers=workers)


def read_records(path_or_text) -> list[SweepRecord]:
    text = str(path_or_text)
    if "\n" not in text and Path(text).exists():
        text = Path(text).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or tuple(lines[0].split(",")) != CSV_COLUMNS:
        raise ValueError("missing or malformed CSV header")
    types = {f.name: f.type for f in fields(SweepRecord)}
    out = []
    for line in lines[1:]:
        vals = line.split(",")
        kwargs = {}
        for col, v in zip(CSV_COLUMNS, vals):
            if col == "model":
                kwargs[col] = v
            elif types[col] in ("int", int):
                kwargs[col] = int(v)
            else:
                kwargs[col] = float(v)
        out.append(SweepRecord(**kwargs))
    return out


def is_complete(path) -> bool:
    return Path(path).read_text().rstrip().endswith(COMPLETE_MARKER)


def gate_budget(model, n: int, s: float, realizations: int, seed: int = 0, t: int = 1, **options) -> tuple[float, float]:
    """Mean and SEM of two-qubit gates per qubit per timestep."""
    model = Model.parse(model)
    vals = np.array([
        build_schedule(model, n, s, t, stream(seed, model.code, n, r), **options).gates_per_qubit()
        for r in range(realizations)
    ])
    return _mean_sem(vals)


def oracle_check(n: int, trials: int, models: Iterable = tuple(Model), seed: int = 0, s_values=(-2.0, -1.0, 0.0, 1.0), t: int = 2):
    """Compare tableau and state-vector entropies on every region of random circuits.

    Returns (number of comparisons, list of mismatches).
    """
    from .oracle import renyi2_bits, simulate

    comparisons, mismatches = 0, []
    for model in models:
        model = Model.parse(model)
        try:
            layers_per_timestep(model, n)
        except ValueError:
            log.info("oracle check: %s does not support N=%d", model.value, n)
            continue
        for k in range(trials):
            s = s_values[k % len(s_values)]
            sched = build_schedule(model, n, s, t, stream(seed, model.code, n, k, SCHEDULE_STREAM))
            axes = sample_product_axes(n, "random", stream(seed, model.code, n, k, INIT_STREAM))
            tab = Tableau.product(axes)
            tab.run(sched)
            psi = simulate(sched, axes)
            for mask in range(1 << n):
                region = [q for q in range(n) if (mask >> q) & 1]
                a = tab.entropy(region)
                b = renyi2_bits(psi, region)
                comparisons += 1
                if abs(a - b) > 1e-8:
                    mismatches.append((model.value, k, tuple(region), a, b))
    return comparisons, mismatches
