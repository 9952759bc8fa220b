"""Learning inside a menu: the restricted one-inclusion learner and its compression scheme.

For a query x the learner keeps only the members whose values at x and at
every training point lie in the menu, and runs the one-inclusion learner
on that subclass.  It answers label 0 when the subclass is empty or does
not realize the training sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .compression import (
    CompressionError,
    CompressionParams,
    SelectionScheme,
    blockwise_vote,
    boost_blocks,
    positions_of,
)
from .core import (
    Example,
    Hypothesis,
    HypothesisClass,
    InvariantViolation,
    Menu,
    SeedLike,
    make_rng,
    sample_arrays,
)
from .oig import _distinct_labels, _query_label

Y_DAGGER = 0


def menu_from_list(lst: Sequence[Sequence[int]], n_labels: int, n_domain: int | None = None) -> Menu:
    """Per-instance set of labels used by the list; all sets empty for an empty list."""
    if not len(lst):
        if n_domain is None:
            raise InvariantViolation("an empty list needs an explicit domain size")
        return Menu(n_labels, tuple(frozenset() for _ in range(n_domain)))
    arr = np.asarray(lst, dtype=np.int64)
    if n_domain is not None and arr.shape[1] != n_domain:
        raise InvariantViolation("list members do not match the domain size")
    return Menu(n_labels, tuple(frozenset(int(v) for v in col) for col in arr.T))


def _in_menu(table: np.ndarray, mu: Menu) -> np.ndarray:
    """in_menu[h, x] is True iff member h's label at x lies in mu(x)."""
    if mu.n_domain != table.shape[1]:
        raise InvariantViolation("menu and class domains differ")
    return mu.mask[np.arange(table.shape[1])[None, :], table]


@dataclass(frozen=True)
class RestrictedClass:
    """Members of base whose labels lie in the menu at every anchor."""

    base: HypothesisClass
    menu: Menu
    anchors: tuple[int, ...]
    mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        anchors = tuple(sorted({int(a) for a in self.anchors}))
        object.__setattr__(self, "anchors", anchors)
        ok = _in_menu(self.base.table, self.menu)[:, list(anchors)].all(axis=1)
        object.__setattr__(self, "mask", ok)

    @property
    def members(self) -> tuple[Hypothesis, ...]:
        return tuple(h for h, keep in zip(self.base.members, self.mask) if keep)

    def __len__(self) -> int:
        return int(self.mask.sum())

    def as_class(self) -> HypothesisClass:
        if not self.mask.any():
            raise InvariantViolation("restricted class is empty")
        return self.base.subclass(self.mask)


def restricted_class(H: HypothesisClass, mu: Menu, s: Sequence[Example], x: int) -> RestrictedClass:
    return RestrictedClass(H, mu, tuple(int(p) for p, _ in s) + (int(x),))


def ll_learn_table(xs: np.ndarray, ys: np.ndarray, H: HypothesisClass, mu: Menu) -> np.ndarray:
    """Predictions of the restricted learner at every instance."""
    table = H.table
    n_domain = H.n_domain
    in_menu = _in_menu(table, mu)
    labels = _distinct_labels(xs, ys)
    out = np.full(n_domain, Y_DAGGER, dtype=np.int64)
    if labels is None:
        return out
    points = list(labels)
    base = in_menu[:, points].all(axis=1) if points else np.ones(len(H), dtype=bool)
    if points:
        agree = (table[:, points] == np.array([labels[p] for p in points])[None, :]).all(axis=1)
    else:
        agree = np.ones(len(H), dtype=bool)
    train = xs.tolist()
    for x in range(n_domain):
        sub = base & in_menu[:, x]
        cand = sub & agree
        if not cand.any():
            continue
        col = table[cand, x]
        if (col == col[0]).all():
            out[x] = col[0]
        else:
            out[x] = _query_label(table[sub], train, labels, x)
    return out


def ll_predict(s: Sequence[Example], H: HypothesisClass, mu: Menu, x: int) -> int:
    if not 0 <= x < H.n_domain:
        raise InvariantViolation(f"instance {x} outside the domain")
    xs, ys = sample_arrays(s)
    return int(ll_learn_table(xs, ys, H, mu)[x])


def ll_learn(s: Sequence[Example], H: HypothesisClass, mu: Menu) -> Hypothesis:
    xs, ys = sample_arrays(s)
    return tuple(int(v) for v in ll_learn_table(xs, ys, H, mu))


def lscs_block_size(d_N: int, p: int) -> int:
    """Block length floor(60 d_N ln p), at least 1."""
    if d_N < 1:
        raise InvariantViolation("Natarajan dimension input must be at least 1")
    if p < 1:
        return 1
    return max(1, math.floor(60 * d_N * math.log(p)))


def lscs_rounds(n: int) -> int:
    return math.ceil(40 * math.log(n + 1))


def lscs_size(n: int, d_N: int, p: int) -> int:
    return lscs_rounds(n) * lscs_block_size(d_N, p)


def ll_block_learner(H: HypothesisClass, mu: Menu):
    return lambda xs, ys: ll_learn_table(xs, ys, H, mu)


def lscs_reconstruct(t: Sequence[Example], H: HypothesisClass, mu: Menu, d_N: int) -> Hypothesis:
    m = lscs_block_size(d_N, mu.size)
    return blockwise_vote(t, m, ll_block_learner(H, mu), H.n_domain, H.n_labels)


def lscs_compress(s: Sequence[Example], H: HypothesisClass, mu: Menu, d_N: int,
                  seed: SeedLike = 0, params: CompressionParams = CompressionParams(),
                  trace: dict | None = None) -> tuple[int, ...]:
    """Indices into s of blocks whose reconstruction is correct on the kept examples.

    Kept examples are those with label in the menu on which the member with
    most such agreements is correct.
    """
    m = lscs_block_size(d_N, mu.size)
    s = tuple((int(x), int(y)) for x, y in s)
    filtered = [z for z in s if z in mu]
    if not filtered:
        return ()
    xs, ys = sample_arrays(filtered)
    agree = (H.table[:, xs] == ys[None, :]).sum(axis=1)
    h = H.members[int(np.argmax(agree))]
    target = [z for z in filtered if h[z[0]] == z[1]]
    rounds = lscs_rounds(len(s))
    if params.max_boost_rounds is not None:
        rounds = min(rounds, params.max_boost_rounds)
    learner = ll_block_learner(H, mu)
    t, tr = boost_blocks(target, learner, m, rounds, H.n_domain, H.n_labels, params, make_rng(seed))
    out = blockwise_vote(t, m, learner, H.n_domain, H.n_labels)
    if any(out[x] != y for x, y in target):
        raise CompressionError("reconstruction does not realize the kept examples", tr.as_dict())
    if trace is not None:
        trace.update(tr.as_dict(), size=len(t), kept=len(target), block=m)
    return positions_of(s, t)


def lscs_scheme(H: HypothesisClass, mu: Menu, d_N: int,
                params: CompressionParams = CompressionParams()) -> SelectionScheme:
    m = lscs_block_size(d_N, mu.size)
    learner = ll_block_learner(H, mu)

    def size_fn(n: int) -> int:
        rounds = lscs_rounds(n)
        if params.max_boost_rounds is not None:
            rounds = min(rounds, params.max_boost_rounds)
        return rounds * m

    return SelectionScheme(
        compress=lambda s, seed=0: lscs_compress(s, H, mu, d_N, seed, params),
        reconstruct=lambda t: blockwise_vote(t, m, learner, H.n_domain, H.n_labels),
        size_fn=size_fn,
        block=m,
        learner=learner,
        n_domain=H.n_domain,
        n_labels=H.n_labels,
    )
