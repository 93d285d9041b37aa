"""Monte-Carlo sweeps of logical error rates with resumable JSON-lines output."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import NormalDist

import numpy as np

from .codes import CssCode, generate, load_code
from .decoder import exhaustive_sector_decoder, run_trial
from .encoder import EncoderOptions
from .errors import ConfigError
from .noise import depolarizing_for_code
from .solver import ENGINES, SolverBudget

log = logging.getLogger(__name__)

HARNESS_ENGINES = ENGINES + ("oracle",)


@dataclass
class ExperimentConfig:
    """One sweep. ``code`` is a generator family name or a matrix-text file path.

    ``L`` is an int or the string ``"d"`` (one round per unit of distance).
    The noise grid is the product of ``p`` and ``q``.
    """

    code: str
    p: list
    distances: list = field(default_factory=lambda: [3])
    q: list = field(default_factory=lambda: [0.0])
    L: object = 1
    trials: int = 1000
    seed: int = 0
    engine: str = "embedded"
    solver_cmd: str = None
    output: str = None
    strict3: bool = True
    time_limit: float = None
    workers: int = 1
    timing: bool = True

    def __post_init__(self):
        if isinstance(self.p, (int, float)):
            self.p = [self.p]
        if isinstance(self.q, (int, float)):
            self.q = [self.q]
        if isinstance(self.distances, int):
            self.distances = [self.distances]

    def validate(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.p:
            raise ConfigError("the p grid is empty")
        for x in list(self.p) + list(self.q):
            if not 0 <= x < 1:
                raise ConfigError(f"grid value {x} outside [0, 1)")
        if self.engine not in HARNESS_ENGINES:
            raise ConfigError(f"engine must be one of {HARNESS_ENGINES}")
        if self.engine == "external" and not self.solver_cmd:
            from .solver import default_solver_command

            if not default_solver_command():
                raise ConfigError("external engine needs solver_cmd or MAXSAT_SOLVER_CMD")
        if not (self.L == "d" or (isinstance(self.L, int) and self.L >= 1)):
            raise ConfigError("L must be a positive integer or 'd'")
        if self.engine == "oracle" and self.L != 1:
            raise ConfigError("the oracle engine handles the capacity setting only")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> ExperimentConfig:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def codes(self):
        if Path(self.code).is_file():
            code = load_code(self.code)
            yield code.d, code
        else:
            for d in self.distances:
                yield d, generate(self.code, d)


@dataclass
class ExperimentRecord:
    code: str
    d: int
    n: int
    k: int
    p: float
    q: float
    L: int
    engine: str
    strict3: bool
    seed: int
    trials: int
    failures: int
    failures_x: int
    failures_z: int
    timeouts: int
    p_L: float
    ci_low: float
    ci_high: float
    timeout_rate: float
    mean_vars: float
    mean_clauses: float
    alpha: float
    t_mean: float = None
    t_p50: float = None
    t_p95: float = None

    @property
    def key(self):
        return (self.code, self.d, self.p, self.q, self.L)

    def sigma(self) -> float:
        return float(np.sqrt(self.p_L * (1 - self.p_L) / self.trials))

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=False)


def wilson_interval(failures: int, trials: int, confidence: float = 0.95):
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    phat = failures / trials
    denom = 1 + z**2 / trials
    center = (phat + z**2 / (2 * trials)) / denom
    half = z * np.sqrt(phat * (1 - phat) / trials + z**2 / (4 * trials**2)) / denom
    lo = 0.0 if failures == 0 else max(0.0, float(center - half))
    hi = 1.0 if failures == trials else min(1.0, float(center + half))
    return lo, hi


def _grid_key(p: float) -> int:
    return int(round(p * 10**9))


def _run_chunk(args):
    code, p, q, L, seed, d, indices, engine, solver_cmd, strict3, time_limit = args
    noise = depolarizing_for_code(code, p, q)
    options = EncoderOptions(strict3=strict3)
    budget = SolverBudget(seconds=time_limit)
    decode = exhaustive_sector_decoder if engine == "oracle" else None
    rows = []
    for i in indices:
        out = run_trial(
            code,
            noise,
            L,
            seed,
            key=(d, _grid_key(p), _grid_key(q), L, i),
            engine=engine,
            options=options,
            budget=budget,
            solver_cmd=solver_cmd,
            decode=decode,
        )
        rows.append((out.failed_x, out.failed_z, out.timed_out, out.seconds, out.num_vars, out.num_clauses))
    return rows


def run_point(config: ExperimentConfig, code: CssCode, d: int, p: float, q: float) -> ExperimentRecord:
    L = d if config.L == "d" else config.L
    indices = list(range(config.trials))
    chunks = [indices[i :: config.workers] for i in range(config.workers)]
    tasks = [
        (code, p, q, L, config.seed, d, chunk, config.engine, config.solver_cmd, config.strict3, config.time_limit)
        for chunk in chunks
        if chunk
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            results = list(pool.map(_run_chunk, tasks))
    else:
        results = [_run_chunk(t) for t in tasks]
    rows = [r for chunk in results for r in chunk]
    fx = np.array([r[0] for r in rows])
    fz = np.array([r[1] for r in rows])
    timeouts = int(sum(r[2] for r in rows))
    seconds = np.array([r[3] for r in rows])
    nvars = np.array([r[4] for r in rows], dtype=float)
    nclauses = np.array([r[5] for r in rows], dtype=float)
    failures = int(np.sum(fx | fz))
    lo, hi = wilson_interval(failures, config.trials)
    solved = nvars > 0
    rec = ExperimentRecord(
        code=code.name,
        d=int(d) if d is not None else 0,
        n=code.n,
        k=code.k,
        p=float(p),
        q=float(q),
        L=int(L),
        engine=config.engine,
        strict3=config.strict3,
        seed=config.seed,
        trials=config.trials,
        failures=failures,
        failures_x=int(fx.sum()),
        failures_z=int(fz.sum()),
        timeouts=timeouts,
        p_L=failures / config.trials,
        ci_low=lo,
        ci_high=hi,
        timeout_rate=timeouts / config.trials,
        mean_vars=float(nvars[solved].mean()) if solved.any() else 0.0,
        mean_clauses=float(nclauses[solved].mean()) if solved.any() else 0.0,
        alpha=float((nclauses[solved] / nvars[solved]).mean()) if solved.any() else 0.0,
    )
    if config.timing:
        rec.t_mean = float(seconds.mean())
        rec.t_p50 = float(np.percentile(seconds, 50))
        rec.t_p95 = float(np.percentile(seconds, 95))
    return rec


def mc_sweep(config: ExperimentConfig) -> list:
    """Run every grid point, appending each finished record to ``config.output``.

    Points already present in the output file are loaded instead of rerun,
    so an interrupted sweep resumes where it stopped.
    """
    config.validate()
    done = {}
    out_path = Path(config.output) if config.output else None
    if out_path is not None and out_path.exists():
        for rec in load_records(out_path):
            done[rec.key] = rec
    records = []
    for d, code in config.codes():
        for p in config.p:
            for q in config.q:
                L = d if config.L == "d" else config.L
                key = (code.name, int(d) if d is not None else 0, float(p), float(q), int(L))
                if key in done:
                    records.append(done[key])
                    continue
                log.info("running %s p=%g q=%g L=%d (%d trials)", code.name, p, q, L, config.trials)
                rec = run_point(config, code, d, p, q)
                records.append(rec)
                if out_path is not None:
                    with out_path.open("a", encoding="utf-8") as fh:
                        fh.write(rec.to_json() + "\n")
    return records


def load_records(path) -> list:
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            records.append(ExperimentRecord(**json.loads(line)))
    return records


CSV_COLUMNS = [f.name for f in dataclasses.fields(ExperimentRecord)]


def export(records, path, format: str = "jsonl") -> None:
    """Write records as JSON lines or CSV (fixed column order, header always present)."""
    path = Path(path)
    if format == "jsonl":
        path.write_text("".join(r.to_json() + "\n" for r in records), encoding="utf-8")
    elif format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in records:
            writer.writerow(dataclasses.asdict(r))
        path.write_text(buf.getvalue(), encoding="utf-8")
    else:
        raise ValueError("format must be 'jsonl' or 'csv'")


def curves_by_distance(records) -> dict:
    """``{d: (p array, p_L array)}`` sorted by p, for the fitting helpers."""
    curves = {}
    for r in sorted(records, key=lambda r: (r.d, r.p)):
        ps, ys = curves.setdefault(r.d, ([], []))
        ps.append(r.p)
        ys.append(r.p_L)
    return {d: (np.array(ps), np.array(ys)) for d, (ps, ys) in curves.items()}
