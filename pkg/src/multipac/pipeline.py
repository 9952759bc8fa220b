"""The three-stage agnostic learner and its sample-size calculator.

Stage one builds a finite cover of candidate classifiers from the first
part of the data, stage two runs multiplicative weights over the cover to
get a short list, and stage three learns inside the menu the list induces.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .compression import CC_MODES, MODES, CompressionParams, cc_enumerate, scsr_scheme, scsr_size
from .core import (
    Example,
    Hypothesis,
    HypothesisClass,
    InvariantViolation,
    Menu,
    derive_seed,
)
from .listbound import lscs_block_size, lscs_compress, lscs_reconstruct, lscs_size, menu_from_list
from .listlearn import mw_list_learn

STAGE_COVER, STAGE_LIST, STAGE_FINAL = "cover", "list", "final"


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it and the cause is chained."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage


@dataclass(frozen=True)
class MaplConfig:
    mode: str = "practical"
    epsilon: float = 0.1
    delta: float = 0.1
    eta: float = 0.5
    d_override: int | None = None
    d_N_override: int | None = None
    seed: int = 0
    gamma: float = 1 / 3
    cc_mode: str = "proxies"

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvariantViolation(f"mode must be one of {MODES}")
        if not (0 < self.epsilon < 1 and 0 < self.delta < 1):
            raise InvariantViolation("epsilon and delta must lie in (0, 1)")
        if not 0 < self.eta <= 1:
            raise InvariantViolation("eta must lie in (0, 1]")
        if self.cc_mode not in CC_MODES:
            raise InvariantViolation(f"cc_mode must be one of {CC_MODES}")


@dataclass(frozen=True)
class MaplRun:
    hypothesis: Hypothesis
    report: dict
    cover: HypothesisClass = field(repr=False)
    list: tuple[Hypothesis, ...] = field(repr=False)
    menu: Menu = field(repr=False)


def split_thirds(s: Sequence[Example]):
    n = len(s)
    if n < 3:
        raise InvariantViolation("need at least three examples to split")
    k = n // 3
    s = tuple(s)
    return s[:k], s[k:2 * k], s[2 * k:]


def digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, separators=(",", ":")).encode()).hexdigest()[:16]


def _menu_digest(mu: Menu) -> str:
    return digest([sorted(m) for m in mu.sets])


def resolve_dimensions(H: HypothesisClass, cfg: MaplConfig) -> tuple[int, int]:
    """Weak sample size and (at least 1) Natarajan dimension, unless overridden."""
    from .dimensions import natarajan_dimension, weak_sample_size

    d = cfg.d_override if cfg.d_override is not None else weak_sample_size(H, cfg.gamma)
    if cfg.d_N_override is not None:
        d_N = cfg.d_N_override
    else:
        d_N = natarajan_dimension(H).value
    return d, max(1, d_N)


def run_mapl_sized(s1: Sequence[Example], s2: Sequence[Example], s3: Sequence[Example],
                   H: HypothesisClass, cfg: MaplConfig = MaplConfig(), entry: str = "sized") -> MaplRun:
    if not s2:
        raise InvariantViolation("the list stage needs at least one example")
    d, d_N = resolve_dimensions(H, cfg)
    params = CompressionParams(gamma=cfg.gamma, mode=cfg.mode, d_weak=d)
    try:
        scheme = scsr_scheme(H, params)
        F = cc_enumerate(s1, H, scheme, mode=cfg.cc_mode, seed=derive_seed(cfg.seed, 1))
    except Exception as exc:
        raise StageError(STAGE_COVER, exc) from exc
    try:
        out = mw_list_learn(len(s2), s2, cfg.eta, F, seed=derive_seed(cfg.seed, 2))
        mu = menu_from_list(out.list, H.n_labels, H.n_domain)
    except Exception as exc:
        raise StageError(STAGE_LIST, exc) from exc
    try:
        trace: dict = {}
        idx = lscs_compress(s3, H, mu, d_N, derive_seed(cfg.seed, 3), params, trace)
        t = [tuple(s3[i]) for i in idx]
        h = lscs_reconstruct(t, H, mu, d_N)
    except Exception as exc:
        raise StageError(STAGE_FINAL, exc) from exc
    report = {
        "entry": entry,
        "config": asdict(cfg),
        "sizes": {"s1": len(s1), "s2": len(s2), "s3": len(s3)},
        "d_weak": d,
        "d_N": d_N,
        "cover": {"mode": cfg.cc_mode, "size": len(F), "scsr_size_bound": scheme.size_fn(len(s1)),
                  "digest": digest([list(f) for f in F.members])},
        "list": {"rounds": len(s2), "length": len(out.list), "cover_digest": digest([list(f) for f in F.members]),
                 "digest": digest([list(h) for h in out.list]), "cumulative_reward": out.cumulative_reward},
        "menu": {"size": mu.size, "digest": _menu_digest(mu), "list_digest": digest([list(h) for h in out.list])},
        "final": {"block": lscs_block_size(d_N, mu.size), "compressed_size": len(idx),
                  "size_bound": lscs_size(len(s3), d_N, mu.size), "menu_digest": _menu_digest(mu),
                  "fallback": bool(trace.get("fallback", False))},
        "hypothesis_digest": digest(list(h)),
    }
    return MaplRun(h, report, F, out.list, mu)


def run_mapl(s: Sequence[Example], H: HypothesisClass, cfg: MaplConfig = MaplConfig()) -> MaplRun:
    s1, s2, s3 = split_thirds(s)
    return run_mapl_sized(s1, s2, s3, H, cfg, entry="split")


def mapl(s: Sequence[Example], H: HypothesisClass, cfg: MaplConfig = MaplConfig()) -> Hypothesis:
    return run_mapl(s, H, cfg).hypothesis


def check_lineage(run: MaplRun) -> bool:
    """The menu fed to the final stage is the one induced by the list learned over the cover."""
    r = run.report
    return (
        r["list"]["cover_digest"] == r["cover"]["digest"]
        and r["menu"]["list_digest"] == r["list"]["digest"]
        and r["final"]["menu_digest"] == r["menu"]["digest"]
        and menu_from_list(run.list, run.menu.n_labels, run.menu.n_domain) == run.menu
    )


@dataclass(frozen=True)
class SampleSizes:
    n1: int
    n2: int
    n3: int
    k1: int
    log_cover: float
    mode: str
    order_level: tuple[str, ...] = ("n1", "n3")


def list_rounds(F_size: int, epsilon: float, delta: float) -> int:
    """Rounds after which the list misses a fixed member's correct labels with mass at most epsilon."""
    return math.ceil((4 * math.log(F_size) + 14 * math.log(3 / delta) + 12) / epsilon)


def sample_size_calculator(d: int, d_N: int, epsilon: float, delta: float, mode: str = "faithful",
                           F_size: int | None = None, gamma: float = 1 / 3,
                           practical_scale: float = 0.01) -> SampleSizes:
    """Per-stage sample sizes.

    n2 is explicit.  n1 and n3 are order-level expressions with every
    hidden constant set to 1.  With ``F_size`` unset the cover is bounded by
    n1^(k1 + 1) where k1 is the compression size at n1.
    """
    if d < 1 or d_N < 1:
        raise InvariantViolation("dimensions must be at least 1")
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise InvariantViolation("epsilon and delta must lie in (0, 1)")
    if mode not in MODES:
        raise InvariantViolation(f"mode must be one of {MODES}")
    n1 = math.ceil((d * math.log(d / epsilon) ** 2 + math.log(1 / delta)) / epsilon)
    k1 = scsr_size(n1, d, gamma)
    log_cover = math.log(F_size) if F_size is not None else (k1 + 1) * math.log(n1)
    n2 = math.ceil(8 * (2 * log_cover + 7 * math.log(9 / delta) + 6) / epsilon)
    inner = d_N * math.log(n2)
    n3 = math.ceil((inner * math.log(inner / epsilon) ** 2 + math.log(1 / delta)) / epsilon ** 2)
    if mode == "practical":
        n1, n2, n3 = (max(1, math.ceil(v * practical_scale)) for v in (n1, n2, n3))
    return SampleSizes(n1, n2, n3, k1, log_cover, mode)
