"""Class and distribution generators."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..core import Distribution, Hypothesis, HypothesisClass, InvariantViolation, Menu, SeedLike, make_rng
from ..dimensions import PseudoCubeWitness, ds_dimension


def gen_constant_class(K: int, n_domain: int) -> HypothesisClass:
    if K < 1 or n_domain < 1:
        raise InvariantViolation("need at least one label and one instance")
    return HypothesisClass(n_domain, K, tuple((i,) * n_domain for i in range(K)))


def gen_random_class(n_domain: int, n_labels: int, size: int, seed: SeedLike) -> HypothesisClass:
    rng = make_rng(seed)
    rows = rng.integers(0, n_labels, size=(size, n_domain))
    return HypothesisClass(n_domain, n_labels, tuple(map(tuple, rows.tolist())))


def gen_threshold_class(n_domain: int) -> HypothesisClass:
    """Thresholds on a line whose positive side carries one of three labels.

    h_theta(x) = 0 for x < theta and (theta mod 3) + 1 otherwise, for theta
    in 0..n_domain.  Natarajan dimension 1.
    """
    members = []
    for theta in range(n_domain + 1):
        members.append(tuple(0 if x < theta else theta % 3 + 1 for x in range(n_domain)))
    return HypothesisClass(n_domain, 4, tuple(members))


def realizable_distribution(h: Sequence[int], n_labels: int, marginal: Sequence[float] | None = None) -> Distribution:
    """Labels given by h under the given marginal (uniform by default), exact when uniform."""
    n = len(h)
    if marginal is None:
        table = [[Fraction(1, n) if y == h[x] else Fraction(0) for y in range(n_labels)] for x in range(n)]
        return Distribution.from_fractions(table)
    m = np.asarray(marginal, dtype=np.float64)
    probs = np.zeros((n, n_labels))
    probs[np.arange(n), np.asarray(h)] = m / m.sum()
    return Distribution(probs)


def gen_appendix_a(K: int, grid: int) -> tuple[HypothesisClass, Distribution]:
    """Constant classifiers against a distribution whose best member is the rarely-listed label 0.

    The domain is ``grid`` equally likely points; the first third always
    carries label 0 and every other point carries a uniform label in 1..K-1.
    """
    if K < 3:
        raise InvariantViolation("need K >= 3")
    if grid < 3 or grid % 3:
        raise InvariantViolation("grid must be a positive multiple of 3")
    table = []
    for x in range(grid):
        row = [Fraction(0)] * K
        if x < grid // 3:
            row[0] = Fraction(1, grid)
        else:
            for y in range(1, K):
                row[y] = Fraction(1, grid * (K - 1))
        table.append(row)
    return gen_constant_class(K, grid), Distribution.from_fractions(table)


def appendix_a_list(K: int, n_domain: int) -> tuple[Hypothesis, ...]:
    return tuple((i,) * n_domain for i in range(1, K))


def min_list_bounded_error(P: Distribution, mu: Menu, exact: bool = False):
    """Smallest error of any classifier whose label at every x lies in mu(x).

    Instances with an empty menu set contribute their whole mass.
    """
    if mu.n_domain != P.n_domain:
        raise InvariantViolation("menu and distribution domains differ")
    if exact:
        if P.exact is None:
            raise InvariantViolation("distribution has no exact table")
        kept = sum((max((P.exact[x][y] for y in mu.sets[x]), default=Fraction(0)) for x in range(P.n_domain)),
                   Fraction(0))
        return 1 - kept
    masked = np.where(mu.mask, P.probs, 0.0)
    return float(1.0 - masked.max(axis=1).sum())


def list_coverage_gap(P: Distribution, lst: Sequence[Sequence[int]], exact: bool = False):
    """P(Y is not among the list's labels at X)."""
    mask = np.ones((P.n_domain, P.n_labels), dtype=bool)
    if len(lst):
        arr = np.asarray(lst, dtype=np.int64)
        for h in arr:
            mask[np.arange(P.n_domain), h] = False
    return P.mass(mask, exact=exact)


LOWER_BOUND_CONSTANT = 144 * math.e


def gen_lower_bound_instance(H: HypothesisClass, epsilon: float,
                             witness: PseudoCubeWitness | None = None) -> list[Distribution]:
    """One distribution per vertex of a pseudo-cube witness.

    Each puts mass ``1 - 144 e epsilon`` on the first witness point and
    spreads the rest uniformly over the others, labelled by the vertex.
    """
    if not 0 < epsilon < 1 / LOWER_BOUND_CONSTANT:
        raise InvariantViolation("epsilon must lie in (0, 1/(144 e))")
    if witness is None:
        res = ds_dimension(H)
        witness = res.witness
    if witness is None:
        raise InvariantViolation("class shatters no tuple; no witness available")
    d = len(witness.points)
    if d < 2:
        raise InvariantViolation("construction needs a witness of size at least 2")
    head = 1 - LOWER_BOUND_CONSTANT * epsilon
    rest = LOWER_BOUND_CONSTANT * epsilon / (d - 1)
    family = []
    for v in sorted(witness.cube):
        probs = np.zeros((H.n_domain, H.n_labels))
        for i, (x, y) in enumerate(zip(witness.points, v)):
            probs[x, y] += head if i == 0 else rest
        probs /= probs.sum()
        family.append(Distribution(probs))
    return family
