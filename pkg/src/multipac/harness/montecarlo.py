"""Monte Carlo estimates of excess risk."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..core import (
    Distribution,
    Example,
    Hypothesis,
    HypothesisClass,
    InvariantViolation,
    best_in_class,
    derive_seed,
    error_rate,
    sample,
)

Learner = Callable[[Sequence[Example], int], Hypothesis]


@dataclass(frozen=True)
class ExcessRiskSummary:
    n: int
    values: tuple[float, ...]
    mean: float
    median: float
    q90: float
    epsilon: float
    freq_above: float


def trial_seeds(seed: int, n: int, trial: int) -> tuple[int, int]:
    """Independent (sampling, learner) seeds for one trial."""
    return derive_seed(seed, n, trial, 0), derive_seed(seed, n, trial, 1)


def summarize(n: int, values: Sequence[float], epsilon: float) -> ExcessRiskSummary:
    arr = np.asarray(values, dtype=np.float64)
    return ExcessRiskSummary(
        n=n,
        values=tuple(float(v) for v in arr),
        mean=float(arr.mean()),
        median=float(np.quantile(arr, 0.5)),
        q90=float(np.quantile(arr, 0.9)),
        epsilon=epsilon,
        freq_above=float((arr > epsilon).mean()),
    )


def monte_carlo_excess_risk(learner: Learner, H: HypothesisClass, P: Distribution, n: int, trials: int,
                            seed: int, epsilon: float = 0.1) -> ExcessRiskSummary:
    """Excess risk of the learner's output over ``trials`` independent samples of size n."""
    if trials < 1:
        raise InvariantViolation("need at least one trial")
    # same summation as the learner's error, so a best-in-class output scores exactly 0
    best = error_rate(best_in_class(H, P)[0], P)
    values = []
    for trial in range(trials):
        s_seed, l_seed = trial_seeds(seed, n, trial)
        s = sample(P, n, s_seed)
        h = learner(s, l_seed)
        values.append(error_rate(h, P) - best)
    return summarize(n, values, epsilon)
