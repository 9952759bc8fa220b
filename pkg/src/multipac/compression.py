"""Selection schemes built by boosting a realizable learner, and the finite cover CC.

A scheme here is a pair (compress, reconstruct).  ``reconstruct`` cuts its
input into consecutive blocks of a fixed length, runs a weak learner on
each block and takes the pointwise plurality vote; a trailing partial block
is ignored and fewer than one full block gives the all-zero hypothesis.
``compress`` picks the member with the most agreements on the input,
keeps the examples it gets right, and searches for blocks whose vote is
correct on all of them.

The search is a Hedge-style boosting loop.  With weak error at most gamma
per round and step ``eta = ln(2(1 - gamma))`` the total weight shrinks by a
factor ``1/2 + gamma`` per round, so after ``a`` rounds every example is
covered by a strict majority once ``a * (ln(1/(1/2 + gamma)) - eta/2) > ln n``.
The forced round count of the faithful mode satisfies this for gamma = 1/3.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import (
    BudgetExceeded,
    Example,
    Hypothesis,
    HypothesisClass,
    InvariantViolation,
    MultipacError,
    SeedLike,
    agreement_counts,
    make_rng,
    majority_vote,
    sample_arrays,
)
from .oig import oig_learn_table

MODES = ("faithful", "practical")
CC_MODES = ("full", "block", "proxies")

BlockLearner = Callable[[np.ndarray, np.ndarray], np.ndarray]


class CompressionError(MultipacError):
    """No realizing compression was found; carries the search diagnostics."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(f"{message}: {diagnostics}")
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class CompressionParams:
    gamma: float = 1 / 3
    mode: str = "faithful"
    d_weak: int | None = None
    max_boost_rounds: int | None = None
    round_retries: int = 64
    scan_budget: int = 20_000
    fallback_draws: int = 200

    def __post_init__(self):
        if not 0 < self.gamma < 0.5:
            raise InvariantViolation("gamma must lie in (0, 1/2)")
        if self.mode not in MODES:
            raise InvariantViolation(f"mode must be one of {MODES}")
        if self.d_weak is not None and self.d_weak < 1:
            raise InvariantViolation("weak sample size must be at least 1")


@dataclass(frozen=True)
class SelectionScheme:
    """compress(s, seed) -> indices into s; reconstruct(t) -> hypothesis."""

    compress: Callable[[Sequence[Example], SeedLike], tuple[int, ...]]
    reconstruct: Callable[[Sequence[Example]], Hypothesis]
    size_fn: Callable[[int], int]
    block: int
    learner: BlockLearner
    n_domain: int
    n_labels: int


def default_hypothesis(n_domain: int) -> Hypothesis:
    return (0,) * n_domain


def hedge_eta(gamma: float) -> float:
    return math.log(2 * (1 - gamma))


def scsr_rounds(n: int, gamma: float = 1 / 3) -> int:
    """Forced boosting round count for an input of length n."""
    return math.ceil(3.01 * math.log(n + 1) / ((1 / (2 * gamma) - 1) ** 2 * gamma))


def scsr_size(n: int, d_weak: int, gamma: float = 1 / 3) -> int:
    return scsr_rounds(n, gamma) * d_weak


def blockwise_vote(t: Sequence[Example], block: int, learner: BlockLearner,
                   n_domain: int, n_labels: int) -> Hypothesis:
    """Plurality vote of the learner over consecutive full blocks of t."""
    a = len(t) // block
    if a < 1:
        return default_hypothesis(n_domain)
    xs, ys = sample_arrays(t)
    outs = [learner(xs[i * block:(i + 1) * block], ys[i * block:(i + 1) * block]) for i in range(a)]
    return majority_vote(outs, n_labels)


def oig_block_learner(H: HypothesisClass) -> BlockLearner:
    """One-inclusion learner on a block; all-zero table on a non-realizable block."""
    fallback = np.zeros(H.n_domain, dtype=np.int64)

    def learn(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        out = oig_learn_table(xs, ys, H.table)
        return fallback if out is None else out

    return learn


def scsr_reconstruct(t: Sequence[Example], H: HypothesisClass, params: CompressionParams) -> Hypothesis:
    d = resolve_d_weak(H, params)
    return blockwise_vote(t, d, oig_block_learner(H), H.n_domain, H.n_labels)


def resolve_d_weak(H: HypothesisClass, params: CompressionParams) -> int:
    if params.d_weak is not None:
        return params.d_weak
    from .dimensions import weak_sample_size

    return weak_sample_size(H, params.gamma)


def _distinct(examples: Sequence[Example]) -> tuple[list[Example], np.ndarray]:
    order: dict[Example, int] = {}
    counts: list[int] = []
    for z in examples:
        z = (int(z[0]), int(z[1]))
        j = order.setdefault(z, len(order))
        if j == len(counts):
            counts.append(0)
        counts[j] += 1
    return list(order), np.array(counts, dtype=np.float64)


@dataclass
class BoostTrace:
    rounds: int = 0
    retries: int = 0
    scans: int = 0
    fallback: bool = False
    weak_errors: list = None

    def as_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "retries": self.retries,
            "scans": self.scans,
            "fallback": self.fallback,
            "max_weak_error": max(self.weak_errors, default=0.0),
        }


def boost_blocks(target: Sequence[Example], learner: BlockLearner, block: int, rounds: int,
                 n_domain: int, n_labels: int, params: CompressionParams,
                 rng: np.random.Generator) -> tuple[list[Example], BoostTrace]:
    """Blocks of examples from target whose blockwise vote is correct on all of target.

    Returns the concatenated blocks (length a multiple of ``block``, at most
    ``rounds * block``) and a trace.  Raises CompressionError when both the
    boosting loop and the random fallback fail.
    """
    trace = BoostTrace(weak_errors=[])
    if not target:
        return [], trace
    pts, counts = _distinct(target)
    u = len(pts)
    px = np.array([p[0] for p in pts], dtype=np.int64)
    py = np.array([p[1] for p in pts], dtype=np.int64)
    memo: dict[tuple[int, ...], np.ndarray] = {}

    def run(idx: tuple[int, ...]) -> np.ndarray:
        out = memo.get(idx)
        if out is None:
            sel = np.array(idx, dtype=np.int64)
            out = np.asarray(learner(px[sel], py[sel]), dtype=np.int64)
            memo[idx] = out
        return out

    eta = hedge_eta(params.gamma)
    logw = np.log(counts)
    votes = np.zeros((n_labels, n_domain), dtype=np.int64)
    cols = np.arange(n_domain)
    chosen: list[tuple[int, ...]] = []
    n_scan = math.comb(u + block - 1, block)
    done = False

    for _ in range(rounds):
        w = np.exp(logw - logw.max())
        w /= w.sum()
        pick = None
        for attempt in range(params.round_retries):
            idx = tuple(sorted(int(i) for i in rng.choice(u, size=block, p=w)))
            pred = run(idx)
            err = float(w[pred[px] != py].sum())
            if err <= params.gamma:
                pick = (idx, pred, err)
                break
            trace.retries += 1
        if pick is None and n_scan <= params.scan_budget:
            trace.scans += 1
            best = None
            for idx in itertools.combinations_with_replacement(range(u), block):
                pred = run(idx)
                err = float(w[pred[px] != py].sum())
                if best is None or err < best[2]:
                    best = (idx, pred, err)
            if best[2] <= params.gamma:
                pick = best
        if pick is None:
            break
        idx, pred, err = pick
        trace.weak_errors.append(err)
        chosen.append(idx)
        trace.rounds += 1
        votes[pred, cols] += 1
        logw[pred[px] == py] -= eta
        realized = bool((votes.argmax(axis=0)[px] == py).all())
        if params.mode == "practical" and realized:
            done = True
            break
        done = realized and trace.rounds == rounds

    if not done:
        chosen = _random_fallback(u, block, rounds, run, px, py, n_domain, n_labels, params, rng)
        trace.fallback = True
        if chosen is None:
            raise CompressionError("no realizing block sequence found", trace.as_dict() | {
                "distinct_examples": u, "block": block, "target_rounds": rounds})
    t = [pts[i] for idx in chosen for i in idx]
    return t, trace


def _random_fallback(u, block, rounds, run, px, py, n_domain, n_labels, params, rng):
    cols = np.arange(n_domain)
    for _ in range(params.fallback_draws):
        chosen = [tuple(sorted(int(i) for i in rng.integers(0, u, size=block))) for _ in range(rounds)]
        votes = np.zeros((n_labels, n_domain), dtype=np.int64)
        for idx in chosen:
            votes[run(idx), cols] += 1
        if (votes.argmax(axis=0)[px] == py).all():
            return chosen
    return None


def best_member(H: HypothesisClass, s: Sequence[Example]) -> int:
    """Index of the member with most agreements on s, first in canonical order on ties."""
    return int(np.argmax(agreement_counts(H, s)))


def positions_of(s: Sequence[Example], t: Sequence[Example]) -> tuple[int, ...]:
    first: dict[Example, int] = {}
    for i, (x, y) in enumerate(s):
        first.setdefault((int(x), int(y)), i)
    return tuple(first[(int(x), int(y))] for x, y in t)


def scsr_compress(s: Sequence[Example], H: HypothesisClass, params: CompressionParams,
                  seed: SeedLike = 0, trace: dict | None = None) -> tuple[int, ...]:
    """Indices into s of blocks whose reconstruction is correct on s(h~)."""
    d = resolve_d_weak(H, params)
    s = tuple((int(x), int(y)) for x, y in s)
    if not s:
        return ()
    h = H.members[best_member(H, s)]
    target = [z for z in s if h[z[0]] == z[1]]
    rounds = scsr_rounds(len(s), params.gamma)
    if params.max_boost_rounds is not None:
        rounds = min(rounds, params.max_boost_rounds)
    learner = oig_block_learner(H)
    t, tr = boost_blocks(target, learner, d, rounds, H.n_domain, H.n_labels, params, make_rng(seed))
    out = blockwise_vote(t, d, learner, H.n_domain, H.n_labels)
    if any(out[x] != y for x, y in target):
        raise CompressionError("reconstruction does not realize the kept examples", tr.as_dict())
    if trace is not None:
        trace.update(tr.as_dict(), size=len(t), kept=len(target), d_weak=d)
    return positions_of(s, t)


def scsr_scheme(H: HypothesisClass, params: CompressionParams = CompressionParams()) -> SelectionScheme:
    d = resolve_d_weak(H, params)
    params = CompressionParams(**{**params.__dict__, "d_weak": d})
    learner = oig_block_learner(H)

    def size_fn(n: int) -> int:
        rounds = scsr_rounds(n, params.gamma)
        if params.max_boost_rounds is not None:
            rounds = min(rounds, params.max_boost_rounds)
        return rounds * d

    return SelectionScheme(
        compress=lambda s, seed=0: scsr_compress(s, H, params, seed),
        reconstruct=lambda t: blockwise_vote(t, d, learner, H.n_domain, H.n_labels),
        size_fn=size_fn,
        block=d,
        learner=learner,
        n_domain=H.n_domain,
        n_labels=H.n_labels,
    )


def _from_members(members, H: HypothesisClass) -> HypothesisClass:
    return HypothesisClass(H.n_domain, H.n_labels, tuple(members))


def cc_enumerate(s: Sequence[Example], H: HypothesisClass, scheme: SelectionScheme,
                 mode: str = "full", element_budget: int = 200_000, seed: SeedLike = 0) -> HypothesisClass:
    """Finite cover: reconstructions of every short sequence drawn from s.

    ``full`` feeds every tuple of positions of length up to ``size_fn(|s|)``
    to reconstruct.  ``block`` reaches the same set through the block
    structure: since reconstruct ignores a trailing partial block and the
    plurality vote ignores order, it enumerates multisets of distinct block
    outputs.  ``proxies`` keeps only ``reconstruct(compress(s(h)))`` for each
    member h, which is the subfamily the generalization argument uses.
    """
    if mode not in CC_MODES:
        raise InvariantViolation(f"mode must be one of {CC_MODES}")
    s = tuple((int(x), int(y)) for x, y in s)
    k = scheme.size_fn(len(s))
    if mode == "proxies":
        members = []
        for i, h in enumerate(H.members):
            sub = [z for z in s if h[z[0]] == z[1]]
            idx = scheme.compress(sub, (_seed_int(seed), i))
            members.append(scheme.reconstruct([sub[j] for j in idx]))
        return _from_members(members, H)
    if mode == "full":
        total = sum(len(s) ** j for j in range(k + 1))
        if total > element_budget:
            raise BudgetExceeded(f"{total} tuples exceed the element budget {element_budget}; use a smaller size_fn")
        members = {scheme.reconstruct(())}
        for j in range(1, k + 1):
            for pos in itertools.product(range(len(s)), repeat=j):
                members.add(scheme.reconstruct([s[p] for p in pos]))
        return _from_members(members, H)
    return _cc_blocks(s, H, scheme, k, element_budget)


def _seed_int(seed: SeedLike) -> int:
    if isinstance(seed, (int, np.integer)):
        return int(seed)
    if seed is None:
        return 0
    raise InvariantViolation("cover enumeration needs an integer seed")


def _cc_blocks(s, H, scheme, k, element_budget):
    d = scheme.block
    a_max = k // d
    members = {default_hypothesis(H.n_domain)}
    if a_max < 1 or not s:
        return _from_members(members, H)
    distinct = sorted(set(s))
    n_blocks = math.comb(len(distinct) + d - 1, d)
    if n_blocks > element_budget:
        raise BudgetExceeded(f"{n_blocks} blocks exceed the element budget {element_budget}")
    outputs = set()
    for block in itertools.combinations_with_replacement(distinct, d):
        xs, ys = sample_arrays(block)
        outputs.add(tuple(int(v) for v in scheme.learner(xs, ys)))
    outputs = sorted(outputs)
    count = sum(math.comb(len(outputs) + a - 1, a) for a in range(1, a_max + 1))
    if count > element_budget:
        raise BudgetExceeded(f"{count} block combinations exceed the element budget {element_budget}")
    for a in range(1, a_max + 1):
        for combo in itertools.combinations_with_replacement(outputs, a):
            members.add(majority_vote(combo, H.n_labels))
    return _from_members(members, H)


def cover_size_bound(n: int, k: int) -> int:
    return n ** (k + 1)

