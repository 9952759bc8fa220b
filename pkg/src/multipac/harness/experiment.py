"""Grid experiments: trials over sample sizes, CSV rows per trial, JSON summary.

Rows hold only quantities that are a function of (spec, seed), so reruns
produce byte-identical CSV and summary files.  Wall times go to a separate
timings file.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from pathlib import Path

from ..core import (
    Distribution,
    HypothesisClass,
    InvariantViolation,
    best_in_class,
    error_rate,
    sample,
)
from ..listlearn import list_miss_probability
from ..pipeline import MaplConfig, resolve_dimensions, run_mapl
from .fileio import write_json
from .generators import gen_appendix_a, gen_threshold_class, realizable_distribution
from .montecarlo import summarize, trial_seeds

SCHEMA_VERSION = 1
CSV_COLUMNS = ("schema", "seed", "n", "trial", "excess_risk", "list_miss",
               "cover_size", "menu_size", "compressed_size")


@dataclass(frozen=True)
class ExperimentSpec:
    generator: str
    generator_params: dict
    learner: str = "mapl"
    learner_config: dict = field(default_factory=dict)
    n_grid: tuple[int, ...] = (30, 100, 300)
    trials: int = 10
    epsilon: float = 0.1
    delta: float = 0.2
    seed: int = 0
    output: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        if self.trials < 1:
            raise InvariantViolation("trials must be at least 1")
        if not self.n_grid or any(a >= b for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise InvariantViolation("n grid must be nonempty and strictly ascending")
        if self.generator not in GENERATORS:
            raise InvariantViolation(f"unknown generator {self.generator!r}")
        if self.learner not in LEARNERS:
            raise InvariantViolation(f"unknown learner {self.learner!r}")

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentSpec":
        known = {f.name for f in fields(cls)}
        extra = set(obj) - known
        if extra:
            raise InvariantViolation(f"unknown spec keys {sorted(extra)}")
        return cls(**obj)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_grid"] = list(self.n_grid)
        return d


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    n: int
    trial: int
    excess_risk: float
    list_miss: float
    cover_size: int
    menu_size: int
    compressed_size: int
    wall_time: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class ExperimentResult:
    records: tuple[TrialRecord, ...]
    summary: dict
    csv_path: Path | None
    json_path: Path | None


def _threshold(n_domain: int = 12, target: int | None = None, decay: float | None = None):
    H = gen_threshold_class(n_domain)
    theta = n_domain // 2 if target is None else target
    h = next(m for m in H.members if m.count(0) == theta)
    if decay is None:
        return H, realizable_distribution(h, H.n_labels)
    # instances next to the threshold are the rarest
    dist = [abs(x + 0.5 - theta) - 0.5 for x in range(n_domain)]
    return H, realizable_distribution(h, H.n_labels, [decay ** d for d in dist])


def _appendix_a(K: int = 11, grid: int = 300):
    return gen_appendix_a(K, grid)


GENERATORS = {"threshold": _threshold, "appendix_a": _appendix_a}
LEARNERS = ("mapl", "erm")


@lru_cache(maxsize=32)
def _problem(generator: str, params: str) -> tuple[HypothesisClass, Distribution]:
    return GENERATORS[generator](**json.loads(params))


def _erm(s, H: HypothesisClass):
    from ..core import agreement_counts

    return H.members[int(agreement_counts(H, s).argmax())]


def run_trial(spec: ExperimentSpec, n: int, trial: int, cfg: MaplConfig | None) -> TrialRecord:
    H, P = _problem(spec.generator, json.dumps(spec.generator_params, sort_keys=True))
    start = time.perf_counter()
    s_seed, l_seed = trial_seeds(spec.seed, n, trial)
    s = sample(P, n, s_seed)
    hstar = best_in_class(H, P)[0]
    best = error_rate(hstar, P)
    if spec.learner == "erm":
        h = _erm(s, H)
        extras = (0.0, 0, 0, 0)
    else:
        run = run_mapl(s, H, MaplConfig(**{**asdict(cfg), "seed": l_seed}))
        h = run.hypothesis
        extras = (list_miss_probability(hstar, run.list, P), run.report["cover"]["size"],
                  run.report["menu"]["size"], run.report["final"]["compressed_size"])
    return TrialRecord(spec.seed, n, trial, error_rate(h, P) - best, *extras,
                       wall_time=time.perf_counter() - start)


def _mapl_config(spec: ExperimentSpec) -> MaplConfig | None:
    if spec.learner != "mapl":
        return None
    H, _ = _problem(spec.generator, json.dumps(spec.generator_params, sort_keys=True))
    base = MaplConfig(**{"epsilon": spec.epsilon, "delta": spec.delta, **spec.learner_config})
    d, d_N = resolve_dimensions(H, base)
    return MaplConfig(**{**asdict(base), "d_override": d, "d_N_override": d_N})


def _fmt(v) -> str:
    return format(v, ".17g") if isinstance(v, float) else str(v)


def records_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([SCHEMA_VERSION] + [_fmt(getattr(r, c)) for c in CSV_COLUMNS[1:]])
    return buf.getvalue()


def _run_one(args):
    return run_trial(*args)


def run_experiment(spec: ExperimentSpec, workers: int = 1, output: str | Path | None = None) -> ExperimentResult:
    """Run every (n, trial) cell; write trials.csv, summary.json and timings.json when an output dir is set."""
    cfg = _mapl_config(spec)
    jobs = [(spec, n, t, cfg) for n in spec.n_grid for t in range(spec.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = tuple(pool.map(_run_one, jobs))
    else:
        records = tuple(_run_one(j) for j in jobs)
    per_n = {}
    for n in spec.n_grid:
        vals = [r.excess_risk for r in records if r.n == n]
        s = summarize(n, vals, spec.epsilon)
        per_n[str(n)] = {"mean": s.mean, "median": s.median, "q90": s.q90, "freq_above": s.freq_above,
                         "trials": len(vals)}
    summary = {"schema": SCHEMA_VERSION, "spec": spec.to_dict(),
               "mapl_config": asdict(cfg) if cfg else None, "per_n": per_n}
    out = output if output is not None else spec.output
    csv_path = json_path = None
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / "trials.csv"
        try:
            csv_path.write_text(records_csv(records))
        except OSError as exc:
            raise OSError(f"{csv_path}: {exc.strerror}") from exc
        json_path = write_json(out / "summary.json", summary)
        write_json(out / "timings.json", [{"n": r.n, "trial": r.trial, "wall_time": r.wall_time} for r in records])
    return ExperimentResult(records, summary, csv_path, json_path)
