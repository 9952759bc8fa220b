"""Multiplicative weights with an adaptive reward, used to learn a short list of classifiers.

A member earns reward on round t only if it is correct on the t-th example
and no classifier picked in an earlier round was.  The returned list is the
sequence of picks of all rounds except the last.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    Distribution,
    Example,
    Hypothesis,
    HypothesisClass,
    InvariantViolation,
    SeedLike,
    make_rng,
)


@dataclass
class MWState:
    """Log-weights over the members of a finite class."""

    log_weights: np.ndarray
    eta: float
    chosen: list[int] = field(default_factory=list)

    @classmethod
    def uniform(cls, size: int, eta: float) -> "MWState":
        if not 0 < eta <= 1:
            raise InvariantViolation("step size must lie in (0, 1]")
        return cls(np.zeros(size), eta)

    def probabilities(self) -> np.ndarray:
        w = np.exp(self.log_weights - self.log_weights.max())
        return w / w.sum()

    def update(self, reward: np.ndarray) -> None:
        self.log_weights = self.log_weights + self.eta * np.asarray(reward, dtype=np.float64)


@dataclass(frozen=True)
class ListOutput:
    list: tuple[Hypothesis, ...]
    trace: tuple[tuple[int, int], ...]
    indices: tuple[int, ...]
    final_log_weights: tuple[float, ...]

    @property
    def cumulative_reward(self) -> int:
        """Sum over all rounds of the reward earned by that round's pick."""
        return sum(r for _, r in self.trace)


def adaptive_reward(h: Sequence[int], z: Example, chosen: Sequence[Sequence[int]]) -> int:
    x, y = z
    if h[x] != y:
        return 0
    return int(all(g[x] != y for g in chosen))


def mw_core(T: int, rewards, eta: float) -> np.ndarray:
    """Distributions p_1..p_T of the weight recursion on the given reward vectors.

    ``rewards`` has shape (T, d) with entries in [0, 1]; row t of the result
    is the distribution used before reward t is revealed.
    """
    if not 0 < eta <= 1:
        raise InvariantViolation("step size must lie in (0, 1]")
    r = np.asarray(rewards, dtype=np.float64)
    if r.ndim != 2 or r.shape[0] < T:
        raise InvariantViolation("need one reward vector per round")
    if ((r < 0) | (r > 1)).any():
        raise InvariantViolation("rewards must lie in [0, 1]")
    log_w = np.zeros(r.shape[1])
    out = np.empty((T, r.shape[1]))
    for t in range(T):
        w = np.exp(log_w - log_w.max())
        out[t] = w / w.sum()
        log_w += eta * r[t]
    return out


def regret_gap(P: np.ndarray, rewards: np.ndarray, eta: float) -> np.ndarray:
    """Per-expert slack of the multiplicative regret inequality; nonnegative when it holds.

    For expert j the slack is
    sum_t <p_t, r_t> - sum_t r_t(j) / (1 + eta) + ln(d) / (eta (1 + eta)).
    """
    T, d = P.shape
    r = np.asarray(rewards, dtype=np.float64)[:T]
    gained = float((P * r).sum())
    return gained - r.sum(axis=0) / (1 + eta) + np.log(d) / (eta * (1 + eta))


def _draw(p: np.ndarray, u: float) -> int:
    cdf = np.cumsum(p)
    return int(min(np.searchsorted(cdf, u * cdf[-1], side="right"), p.size - 1))


def mw_list_learn(T: int, s: Sequence[Example], eta: float, F: HypothesisClass,
                  seed: SeedLike = 0) -> ListOutput:
    """T rounds over the first T examples of s; returns the picks of rounds 1..T-1."""
    if T < 1:
        raise InvariantViolation("need at least one round")
    if len(s) < T:
        raise InvariantViolation(f"sequence of length {len(s)} is shorter than T = {T}")
    rng = make_rng(seed)
    state = MWState.uniform(len(F), eta)
    covered = np.zeros((F.n_domain, F.n_labels), dtype=bool)
    cols = np.arange(F.n_domain)
    trace = []
    for t in range(T):
        x, y = int(s[t][0]), int(s[t][1])
        j = _draw(state.probabilities(), float(rng.random()))
        reward = (F.table[:, x] == y) & (not covered[x, y])
        trace.append((j, int(reward[j])))
        state.chosen.append(j)
        state.update(reward)
        covered[cols, F.table[j]] = True
    picks = tuple(state.chosen[:-1])
    return ListOutput(
        list=tuple(F.members[j] for j in picks),
        trace=tuple(trace),
        indices=picks,
        final_log_weights=tuple(float(v) for v in state.log_weights),
    )


def list_miss_mask(f: Sequence[int], lst: Sequence[Sequence[int]], n_labels: int) -> np.ndarray:
    f = np.asarray(f, dtype=np.int64)
    n = f.size
    mask = np.zeros((n, n_labels), dtype=bool)
    mask[np.arange(n), f] = True
    if len(lst):
        arr = np.asarray(lst, dtype=np.int64)
        hit = (arr == f[None, :]).any(axis=0)
        mask[hit] = False
    return mask


def list_miss_probability(f: Sequence[int], lst: Sequence[Sequence[int]], P: Distribution,
                          exact: bool = False):
    """Mass of pairs where f is correct and f's label is outside the list's labels."""
    if len(f) != P.n_domain:
        raise InvariantViolation("hypothesis and distribution dimensions differ")
    return P.mass(list_miss_mask(f, lst, P.n_labels), exact=exact)


def expected_reward(f: Sequence[int], prefix: Sequence[Sequence[int]], P: Distribution,
                    exact: bool = False):
    """Exact expectation under P of the adaptive reward of f against a frozen prefix."""
    return list_miss_probability(f, prefix, P, exact=exact)
