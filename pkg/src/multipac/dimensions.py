"""Natarajan and DS dimensions, one-inclusion density, and realizable-dimension brackets.

Both shattering notions are hereditary (a sub-tuple of a shattered tuple is
shattered, and projecting a pseudo-cube away from one coordinate leaves a
pseudo-cube), so the searches grow the tuple size and stop at the first
size with no shattered tuple.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from .core import (
    Distribution,
    HypothesisClass,
    InvariantViolation,
    SeedLike,
    error_rate,
    make_rng,
    sample,
    sample_arrays,
)
from .oig import OneInclusionGraph, build_oig, oig_learn_table

DEFAULT_NODE_BUDGET = 5_000_000
DEFAULT_SUBSET_CAP = 20


@dataclass(frozen=True)
class NatarajanWitness:
    points: tuple[int, ...]
    f: tuple[int, ...]
    g: tuple[int, ...]


@dataclass(frozen=True)
class PseudoCubeWitness:
    points: tuple[int, ...]
    cube: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class DimensionResult:
    """``exact`` is False when the node budget ran out; ``value`` is then a lower bound."""

    value: int
    witness: NatarajanWitness | PseudoCubeWitness | None
    exact: bool = True
    nodes: int = 0


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, k: int = 1) -> bool:
        self.used += k
        return self.used <= self.limit


def distinct_columns(H: HypothesisClass) -> tuple[int, ...]:
    """First instance of every distinct column of the class table.

    Two instances with equal columns never sit together in a shattered
    tuple, and inside a density tuple they act exactly like one repeated
    instance, so every search below runs over these representatives.
    """
    _, first = np.unique(H.table.T, axis=0, return_index=True)
    return tuple(sorted(int(i) for i in first))


def _projection(H: HypothesisClass, points: Sequence[int]) -> list[tuple[int, ...]]:
    return sorted(H.project(points))


def _n_shattering_pair(P: list[tuple[int, ...]], budget: _Budget):
    Pset = set(P)
    for a, b in itertools.combinations(P, 2):
        if not budget.spend():
            return False
        if any(u == v for u, v in zip(a, b)):
            continue
        if all(c in Pset for c in itertools.product(*zip(a, b))):
            return a, b
    return None


def natarajan_dimension(H: HypothesisClass, cap: int | None = None,
                        node_budget: int = DEFAULT_NODE_BUDGET) -> DimensionResult:
    if cap is not None and cap < 1:
        raise InvariantViolation("cap must be at least 1")
    reps = distinct_columns(H)
    cap = len(reps) if cap is None else min(cap, len(reps))
    budget = _Budget(node_budget)
    best, witness = 0, None
    for d in range(1, cap + 1):
        found = None
        for pts in itertools.combinations(reps, d):
            pair = _n_shattering_pair(_projection(H, pts), budget)
            if pair is False:
                return DimensionResult(best, witness, exact=False, nodes=budget.used)
            if pair:
                found = NatarajanWitness(pts, pair[0], pair[1])
                break
        if found is None:
            break
        best, witness = d, found
    return DimensionResult(best, witness, exact=True, nodes=budget.used)


def is_pseudo_cube(B, d: int) -> bool:
    B = {tuple(b) for b in B}
    if not B:
        return False
    if any(len(b) != d for b in B):
        raise InvariantViolation(f"vectors must have length {d}")
    return len(pseudo_cube_core(B, d)) == len(B)


def pseudo_cube_core(V, d: int) -> set[tuple[int, ...]]:
    """Largest subset of V in which every vector has an i-neighbor for every i.

    Iteratively deletes vectors that lack a neighbor in some direction.  Any
    pseudo-cube inside V survives, so V contains one iff the result is nonempty.
    """
    alive = {tuple(v) for v in V}
    changed = True
    while changed and alive:
        changed = False
        for i in range(d):
            groups: dict[tuple[int, ...], int] = {}
            for v in alive:
                key = v[:i] + v[i + 1:]
                groups[key] = groups.get(key, 0) + 1
            dead = {v for v in alive if groups[v[:i] + v[i + 1:]] < 2}
            if dead:
                alive -= dead
                changed = True
    return alive


def ds_dimension(H: HypothesisClass, cap: int | None = None,
                 node_budget: int = DEFAULT_NODE_BUDGET) -> DimensionResult:
    if cap is not None and cap < 1:
        raise InvariantViolation("cap must be at least 1")
    reps = distinct_columns(H)
    cap = len(reps) if cap is None else min(cap, len(reps))
    budget = _Budget(node_budget)
    best, witness = 0, None
    for d in range(1, cap + 1):
        found = None
        for pts in itertools.combinations(reps, d):
            P = _projection(H, pts)
            if not budget.spend(len(P)):
                return DimensionResult(best, witness, exact=False, nodes=budget.used)
            core = pseudo_cube_core(P, d)
            if core:
                found = PseudoCubeWitness(pts, tuple(sorted(core)))
                break
        if found is None:
            break
        best, witness = d, found
    return DimensionResult(best, witness, exact=True, nodes=budget.used)


def vc_dimension(H: HypothesisClass) -> int:
    """Textbook VC dimension for binary classes: largest set with all 2^d patterns."""
    best = 0
    for d in range(1, H.n_domain + 1):
        if any(len(H.project(pts)) == 2 ** d and all(set(v) <= {0, 1} for v in H.project(pts))
               for pts in itertools.combinations(range(H.n_domain), d)):
            best = d
        else:
            break
    return best


# --- density -----------------------------------------------------------------

@dataclass(frozen=True)
class DensityResult:
    value: Fraction
    exact: bool
    points: tuple[int, ...] = ()


def average_degree(G: OneInclusionGraph) -> Fraction:
    if not G.vertices:
        return Fraction(0)
    return Fraction(sum(len(e) for _, e in G.edges if len(e) >= 2), len(G.vertices))


def _big_edge_sets(G: OneInclusionGraph) -> list[tuple[int, ...]]:
    return [e for _, e in G.edges if len(e) >= 2]


def _md_enumerate(nv: int, edges: list[tuple[int, ...]]) -> Fraction:
    if not edges:
        return Fraction(0)
    masks = np.arange(1, 1 << nv, dtype=np.int64)
    bits = [((masks >> v) & 1).astype(np.int16) for v in range(nv)]
    size = np.zeros_like(masks, dtype=np.int16)
    for b in bits:
        size += b
    total = np.zeros_like(masks, dtype=np.int32)
    for e in edges:
        cnt = np.zeros_like(size)
        for v in e:
            cnt += bits[v]
        total += np.where(cnt >= 2, cnt, 0)
    # compare total/size exactly by cross-multiplication against the float argmax
    ratio = total / size
    best = float(ratio.max())
    cand = np.nonzero(ratio >= best - 1e-9)[0]
    return max(Fraction(int(total[i]), int(size[i])) for i in cand)


def _md_milp(nv: int, edges: list[tuple[int, ...]]) -> Fraction:
    """Dinkelbach iterations; each step maximizes sum_e c_e - lam * |U| as a 0/1 program.

    Variables: u_v (vertex kept), z_e (edge keeps >= 2 members), c_e (edge contribution).
    """
    if not edges:
        return Fraction(0)
    ne = len(edges)
    nvar = nv + 2 * ne
    rows = []
    for j, e in enumerate(edges):
        zc, cc = nv + j, nv + ne + j
        r = np.zeros(nvar); r[cc] = 1; r[list(e)] = -1; rows.append((r, -np.inf, 0))
        r = np.zeros(nvar); r[cc] = 1; r[zc] = -len(e); rows.append((r, -np.inf, 0))
        r = np.zeros(nvar); r[zc] = 2; r[list(e)] = -1; rows.append((r, -np.inf, 0))
    r = np.zeros(nvar); r[:nv] = 1; rows.append((r, 1, np.inf))
    A = np.array([r for r, _, _ in rows])
    cons = LinearConstraint(A, [lo for _, lo, _ in rows], [hi for _, _, hi in rows])
    integrality = np.concatenate([np.ones(nv + ne), np.zeros(ne)])
    ub = np.concatenate([np.ones(nv + ne), [len(e) for e in edges]])
    bounds = Bounds(np.zeros(nvar), ub)

    def value(u: np.ndarray) -> Fraction:
        keep = set(np.nonzero(u > 0.5)[0].tolist())
        tot = 0
        for e in edges:
            k = sum(1 for v in e if v in keep)
            if k >= 2:
                tot += k
        return Fraction(tot, max(len(keep), 1))

    lam = Fraction(sum(len(e) for e in edges), nv)
    for _ in range(64):
        c = np.zeros(nvar)
        c[:nv] = float(lam)
        c[nv + ne:] = -1.0
        res = milp(c, constraints=cons, integrality=integrality, bounds=bounds)
        if not res.success:
            raise RuntimeError(f"density MILP failed: {res.message}")
        cand = value(res.x[:nv])
        # distinct ratios with denominators <= nv differ by at least 1/nv^2
        if cand <= lam or -res.fun < 0.5 / (nv * nv):
            return max(lam, cand)
        lam = cand
    return lam


def max_average_degree(G: OneInclusionGraph, subset_cap: int = DEFAULT_SUBSET_CAP,
                       method: str = "auto") -> tuple[Fraction, bool]:
    """Exact maximal average degree over induced subgraphs.

    ``method`` is "enumerate" (all subsets; exact only up to ``subset_cap``
    vertices, otherwise the full-vertex-set average degree flagged inexact),
    "milp" (Dinkelbach over a 0/1 program), or "auto" (enumerate when small,
    MILP otherwise).
    """
    nv = len(G.vertices)
    edges = _big_edge_sets(G)
    if nv <= subset_cap and method in ("auto", "enumerate"):
        return _md_enumerate(nv, edges), True
    if method == "enumerate":
        return average_degree(G), False
    return _md_milp(nv, edges), True


def _tuple_layouts(n_domain: int, m: int):
    """Distinct point sets with doubled (frozen) points covering every tuple in X^m.

    A repeated point turns every edge in its direction into a singleton, so
    one doubled point dominates any heavier repetition pattern.
    """
    if m <= n_domain:
        for pts in itertools.combinations(range(n_domain), m):
            yield pts
    for size in range(1, min(m - 1, n_domain) + 1):
        for pts in itertools.combinations(range(n_domain), size):
            for frozen in pts:
                cols = sorted(pts + (frozen,))
                yield tuple(cols)


def density(H: HypothesisClass, m: int, subset_cap: int = DEFAULT_SUBSET_CAP,
            method: str = "auto") -> DensityResult:
    """sup over x in X^m of the maximal average degree of G(H|_x)."""
    if m < 1:
        raise InvariantViolation("m must be positive")
    best, exact, arg = Fraction(0), True, ()
    seen: set[bytes] = set()
    reps = distinct_columns(H)
    for layout in _tuple_layouts(len(reps), m):
        cols = tuple(reps[i] for i in layout)
        proj = np.unique(H.table[:, list(cols)], axis=0)
        key = proj.tobytes() + bytes(str(proj.shape), "ascii")
        if key in seen:
            continue
        seen.add(key)
        G = build_oig(proj.tolist(), len(cols))
        val, ok = max_average_degree(G, subset_cap, method)
        exact = exact and ok
        if val > best:
            best, arg = val, tuple(cols)
    return DensityResult(best, exact, arg)


# --- realizable dimension ----------------------------------------------------

@dataclass(frozen=True)
class RealizableBracket:
    lower: int | None
    upper: int | None
    exhausted: bool = False


@lru_cache(maxsize=4096)
def _density_value(H: HypothesisClass, m: int, subset_cap: int) -> Fraction:
    # a tuple longer than the number of distinct columns repeats one, so density is constant past it
    return density(H, min(m, len(distinct_columns(H)) + 1), subset_cap).value


def oig_density_bound(H: HypothesisClass, n: int, subset_cap: int = DEFAULT_SUBSET_CAP) -> Fraction:
    """Upper bound ceil(mu_H(n+1)) / (n+1) on the one-inclusion learner's expected error."""
    mu = _density_value(H, n + 1, subset_cap)
    return Fraction(math.ceil(mu), n + 1)


def weak_sample_size(H: HypothesisClass, gamma: float, max_n: int = 10_000,
                     subset_cap: int = DEFAULT_SUBSET_CAP) -> int:
    """Smallest n at which the density bound certifies expected error <= gamma."""
    for n in range(1, max_n + 1):
        if oig_density_bound(H, n, subset_cap) <= Fraction(gamma).limit_denominator(10**9):
            return n
    raise InvariantViolation(f"density bound never fell to {gamma} within n <= {max_n}")


def _family_error(H: HypothesisClass, n: int, trials: int, rng: np.random.Generator) -> float:
    total = 0.0
    for _ in range(trials):
        h = H.table[rng.integers(len(H))]
        k = int(rng.integers(1, H.n_domain + 1))
        support = np.sort(rng.choice(H.n_domain, size=k, replace=False))
        probs = np.zeros((H.n_domain, H.n_labels))
        probs[support, h[support]] = 1.0 / k
        P = Distribution(probs)
        s = sample(P, n, rng)
        xs, ys = sample_arrays(s)
        pred = oig_learn_table(xs, ys, H.table)
        total += error_rate(tuple(pred.tolist()), P)
    return total / trials


def estimate_realizable_dimension(H: HypothesisClass, r: float, trial_budget: int = 2000,
                                  seed: SeedLike = 0, trials_per_n: int = 50,
                                  max_n: int = 200,
                                  subset_cap: int = DEFAULT_SUBSET_CAP) -> RealizableBracket:
    """Bracket the sample size at which realizable error drops to r.

    ``upper`` is the density certificate for the one-inclusion learner;
    ``lower`` is where the learner's average error over a generated family
    of realizable distributions first reaches r.
    """
    if not 0 < r < 0.5:
        raise InvariantViolation("r must lie in (0, 1/2)")
    rng = make_rng(seed)
    target = Fraction(r).limit_denominator(10**9)
    upper = lower = None
    spent = 0
    for n in range(1, max_n + 1):
        if upper is None and oig_density_bound(H, n, subset_cap) <= target:
            upper = n
        if lower is None:
            if spent + trials_per_n > trial_budget:
                return RealizableBracket(lower, upper, exhausted=True)
            spent += trials_per_n
            if _family_error(H, n, trials_per_n, rng) <= r:
                lower = n
        if lower is not None and upper is not None:
            break
    return RealizableBracket(lower, upper, exhausted=upper is None or lower is None)
