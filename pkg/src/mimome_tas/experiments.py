"""Monte Carlo sweeps: ergodic secrecy capacity and visited-node complexity.

Every trial draws a fresh ``(Hm, He)`` pair whose seeds depend only on the
sweep seed, the grid-point index and the trial index (see :func:`derive_seed`),
so all methods in a trial see the same channels and a sweep's output is a pure
function of its configuration.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .baselines import DEFAULT_ES_CAP, check_es_budget, exhaustive_select, norm_based_select
from .capacity import db_to_linear, link_capacity
from .channel import generate_rayleigh
from .csie import select_csie
from .errors import ConfigError
from .ncsie import select_ncsie
from .tree import BabOptions, check_shape

METHODS = ("bab", "es", "norm")
SCENARIOS = ("ncsie", "csie")
RECORD_FIELDS = (
    "scenario", "method", "Nt", "Nr", "Ne", "L",
    "rho_m_db", "rho_e_db", "n_trials", "mean_cs_bits", "mean_nodes",
)
DEFAULT_RHO_M_DB = tuple(float(x) for x in range(-5, 16, 2))

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, point: int, trial: int, stream: int) -> int:
    """``seed XOR splitmix64(splitmix64(splitmix64(point) ^ trial) ^ stream)``.

    ``stream`` 0 is the legitimate channel and 1 the eavesdropper channel.
    """
    h = _splitmix64(_splitmix64(_splitmix64(point) ^ trial) ^ stream)
    return (int(seed) ^ h) & _MASK64


def trial_channels(seed: int, point: int, trial: int, nt: int, nr: int, ne: int):
    return (
        generate_rayleigh(nr, nt, derive_seed(seed, point, trial, 0)),
        generate_rayleigh(ne, nt, derive_seed(seed, point, trial, 1)),
    )


def _round12(x: float) -> float:
    return float(f"{x:.12g}")


@dataclass(frozen=True)
class SweepConfig:
    scenario: str = "ncsie"
    nt: tuple[int, ...] | None = None
    nr: int = 4
    ne: int = 8
    L: int = 4
    rho_m_db: tuple[float, ...] = DEFAULT_RHO_M_DB
    rho_e_db: tuple[float, ...] = (5.0,)
    n_trials: int = 2000
    methods: tuple[str, ...] = ("bab", "norm")
    seed: int = 0
    es_cap: int = DEFAULT_ES_CAP
    warm_start: bool = False
    workers: int = 1

    def __post_init__(self):
        # normalize list-ish inputs so configs from JSON hash and compare cleanly
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "rho_m_db", tuple(float(x) for x in _listify(self.rho_m_db)))
        object.__setattr__(self, "rho_e_db", tuple(float(x) for x in _listify(self.rho_e_db)))
        if self.nt is None:
            object.__setattr__(self, "nt", (16,) if "es" in self.methods else (64,))
        else:
            object.__setattr__(self, "nt", tuple(int(x) for x in _listify(self.nt)))

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.n_trials < 1:
            raise ConfigError(f"n_trials must be >= 1, got {self.n_trials}")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ConfigError(f"methods must be a non-empty subset of {METHODS}, got {self.methods}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError(f"duplicate methods in {self.methods}")
        if not self.nt or not self.rho_m_db or not self.rho_e_db:
            raise ConfigError("grids must be non-empty")
        if min(self.nr, self.ne) < 1:
            raise ConfigError("receive antenna counts must be positive")
        for x in self.rho_m_db + self.rho_e_db:
            if not math.isfinite(x):
                raise ConfigError(f"SNR values must be finite, got {x}")
        for nt in self.nt:
            try:
                check_shape(nt, self.L)
            except Exception as exc:
                raise ConfigError(str(exc)) from exc
            if "es" in self.methods:
                check_es_budget(nt, self.L, self.es_cap)

    def points(self) -> list[tuple[int, float, float]]:
        """Grid points ``(Nt, rho_m_db, rho_e_db)`` in index order."""
        return [(nt, rm, re) for nt in self.nt for re in self.rho_e_db for rm in self.rho_m_db]

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def _listify(x) -> Sequence:
    if isinstance(x, (int, float)):
        return (x,)
    return x


@dataclass(frozen=True)
class SweepRecord:
    scenario: str
    method: str
    Nt: int
    Nr: int
    Ne: int
    L: int
    rho_m_db: float
    rho_e_db: float
    n_trials: int
    mean_cs_bits: float
    mean_nodes: float

    def sort_key(self):
        return (self.scenario, self.Nt, self.Nr, self.Ne, self.L,
                self.rho_m_db, self.rho_e_db, self.method)


@dataclass
class MethodTrials:
    """Per-trial arrays for one method at one grid point."""

    cs: np.ndarray
    objective: np.ndarray
    nodes: np.ndarray
    seconds: np.ndarray
    indices: list[tuple[int, ...]] = field(default_factory=list)


@dataclass
class PointOutcome:
    index: int
    nt: int
    rho_m_db: float
    rho_e_db: float
    methods: dict[str, MethodTrials]


def _run_method(method, scenario, Hm, He, L, rho_m, rho_e, options, es_cap):
    if method == "bab":
        if scenario == "ncsie":
            res = select_ncsie(Hm, L, rho_m, options)
        else:
            res = select_csie(Hm, He, L, rho_m, rho_e, options)
        return res.indices, res.objective, res.visited_nodes
    if method == "es":
        res = exhaustive_select(Hm, L, rho_m, He, rho_e, scenario, es_cap)
        return res.indices, res.objective, res.visited_nodes
    idx = norm_based_select(Hm, L)
    cols = [i - 1 for i in idx]
    obj = link_capacity(Hm[:, cols], rho_m)
    if scenario == "csie":
        obj -= link_capacity(He[:, cols], rho_e)
    return idx, obj, Hm.shape[1]


def _run_trials(config: SweepConfig, point: int, nt: int, rm_db: float, re_db: float,
                trials: range) -> dict[str, list]:
    rho_m, rho_e = db_to_linear(rm_db), db_to_linear(re_db)
    options = BabOptions(warm_start=config.warm_start)
    out: dict[str, list] = {m: [] for m in config.methods}
    for t in trials:
        Hm, He = trial_channels(config.seed, point, t, nt, config.nr, config.ne)
        for m in config.methods:
            start = time.perf_counter()
            idx, obj, nodes = _run_method(m, config.scenario, Hm, He, config.L,
                                          rho_m, rho_e, options, config.es_cap)
            elapsed = time.perf_counter() - start
            cols = [i - 1 for i in idx]
            cs = max(0.0, link_capacity(Hm[:, cols], rho_m) - link_capacity(He[:, cols], rho_e))
            out[m].append((cs, obj, nodes, elapsed, idx))
    return out


def _chunks(n: int, parts: int) -> list[range]:
    step = max(1, math.ceil(n / parts))
    return [range(i, min(n, i + step)) for i in range(0, n, step)]


def sweep_outcomes(config: SweepConfig) -> list[PointOutcome]:
    """Run every trial of every grid point; per-trial results are kept."""
    config.validate()
    jobs = []
    for p, (nt, rm, re) in enumerate(config.points()):
        for chunk in _chunks(config.n_trials, max(1, config.workers) * 4 if config.workers > 1 else 1):
            jobs.append((p, nt, rm, re, chunk))

    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_run_trials, config, *job) for job in jobs]
            results = [f.result() for f in futures]
    else:
        results = [_run_trials(config, *job) for job in jobs]

    gathered: dict[int, dict[str, list]] = defaultdict(lambda: defaultdict(list))
    for job, res in zip(jobs, results):
        for m, rows in res.items():
            gathered[job[0]][m].extend(rows)

    outcomes = []
    for p, (nt, rm, re) in enumerate(config.points()):
        per_method = {}
        for m in config.methods:
            rows = gathered[p][m]
            per_method[m] = MethodTrials(
                cs=np.array([r[0] for r in rows]),
                objective=np.array([r[1] for r in rows]),
                nodes=np.array([r[2] for r in rows], dtype=np.int64),
                seconds=np.array([r[3] for r in rows]),
                indices=[r[4] for r in rows],
            )
        outcomes.append(PointOutcome(p, nt, rm, re, per_method))
    return outcomes


def aggregate(config: SweepConfig, outcomes: Iterable[PointOutcome]) -> list[SweepRecord]:
    records = []
    for o in outcomes:
        for m, tr in o.methods.items():
            records.append(SweepRecord(
                scenario=config.scenario, method=m, Nt=o.nt, Nr=config.nr, Ne=config.ne,
                L=config.L, rho_m_db=_round12(o.rho_m_db), rho_e_db=_round12(o.rho_e_db),
                n_trials=len(tr.cs), mean_cs_bits=_round12(float(tr.cs.mean())),
                mean_nodes=_round12(float(tr.nodes.mean())),
            ))
    return sorted(records, key=SweepRecord.sort_key)


def run_ergodic_sweep(config: SweepConfig) -> list[SweepRecord]:
    """Mean clamped secrecy capacity (and node counts) per grid point and method."""
    return aggregate(config, sweep_outcomes(config))


def run_complexity_sweep(config: SweepConfig) -> list[SweepRecord]:
    """Same sweep as :func:`run_ergodic_sweep`; read ``mean_nodes`` from the records.

    Norm-based selection is charged ``Nt`` nodes and exhaustive search the
    size of the full tree.
    """
    return aggregate(config, sweep_outcomes(config))


def node_count_cv(records: Sequence[SweepRecord], method: str = "bab") -> float:
    """Coefficient of variation of ``mean_nodes`` across grid points."""
    vals = np.array([r.mean_nodes for r in records if r.method == method])
    if vals.size == 0:
        raise ConfigError(f"no records for method {method!r}")
    return float(vals.std() / vals.mean())


def _format_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def records_to_csv(records: Sequence[SweepRecord]) -> str:
    if not records:
        raise ConfigError("no records to write")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_FIELDS)
    for r in sorted(records, key=SweepRecord.sort_key):
        w.writerow([_format_value(getattr(r, f)) for f in RECORD_FIELDS])
    return buf.getvalue()


def records_to_json(records: Sequence[SweepRecord]) -> str:
    if not records:
        raise ConfigError("no records to write")
    rows = [{f: getattr(r, f) for f in RECORD_FIELDS}
            for r in sorted(records, key=SweepRecord.sort_key)]
    for row in rows:
        for k, v in row.items():
            if isinstance(v, float):
                row[k] = _round12(v)
    return json.dumps(rows, indent=1) + "\n"


def write_records(records: Sequence[SweepRecord], path: str | os.PathLike, fmt: str = "csv") -> None:
    if fmt == "csv":
        text = records_to_csv(records)
    elif fmt == "json":
        text = records_to_json(records)
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    Path(path).write_text(text, encoding="utf-8")


def read_records(path: str | os.PathLike, fmt: str = "csv") -> list[SweepRecord]:
    text = Path(path).read_text(encoding="utf-8")
    if fmt == "json":
        rows = json.loads(text)
    else:
        rows = list(csv.DictReader(io.StringIO(text)))
    types = {f.name: f.type for f in fields(SweepRecord)}
    out = []
    for row in rows:
        kw = {}
        for k in RECORD_FIELDS:
            t = types[k]
            kw[k] = int(row[k]) if t == "int" else float(row[k]) if t == "float" else str(row[k])
        out.append(SweepRecord(**kw))
    return out


def write_plot_series(records: Sequence[SweepRecord], prefix: str | os.PathLike) -> list[Path]:
    """Write one ``x,y`` file per method, metric and fixed value of the other grid axes."""
    if not records:
        raise ConfigError("no records to plot")
    axes = ("Nt", "rho_m_db", "rho_e_db")
    varying = [a for a in axes if len({getattr(r, a) for r in records}) > 1]
    x_axis = varying[0] if varying else "rho_m_db"
    others = [a for a in varying if a != x_axis]
    groups: dict[tuple, list[SweepRecord]] = defaultdict(list)
    for r in records:
        groups[(r.method,) + tuple(getattr(r, a) for a in others)].append(r)

    prefix = Path(prefix)
    written = []
    for key, rows in sorted(groups.items()):
        rows = sorted(rows, key=lambda r: getattr(r, x_axis))
        tag = "".join(f".{a}{_format_value(v)}" for a, v in zip(others, key[1:]))
        for metric in ("mean_cs_bits", "mean_nodes"):
            path = prefix.with_name(f"{prefix.name}.{key[0]}.{metric}{tag}.csv")
            lines = [f"{x_axis},{metric}"]
            lines += [f"{_format_value(getattr(r, x_axis))},{_format_value(getattr(r, metric))}" for r in rows]
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            written.append(path)
    return written
