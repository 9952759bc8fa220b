"""Finite encodings of the learning problem.

Instances are integers in ``[0, n_domain)`` and labels are integers in
``[0, n_labels)``.  A hypothesis is a label table (one entry per instance),
a sample is a tuple of ``(x, y)`` pairs, and a distribution is a dense
``n_domain x n_labels`` probability table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

Hypothesis = tuple[int, ...]
Example = tuple[int, int]
Sample = tuple[Example, ...]
SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]

NORMALIZATION_TOL = 1e-12


class MultipacError(Exception):
    """Base class for all library errors."""


class InvariantViolation(MultipacError, ValueError):
    """An input or output broke a stated contract."""


class NotRealizableError(InvariantViolation):
    """A sequence is not realizable by the class handed to a realizable learner."""


class BudgetExceeded(MultipacError):
    """A search or enumeration ran past its configured budget."""


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def derive_seed(*key: int) -> int:
    """Stable 63-bit integer seed derived from an integer key path."""
    state = np.random.SeedSequence([int(k) for k in key]).generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


def spawn_seeds(seed: int, count: int) -> list[int]:
    return [derive_seed(seed, i) for i in range(count)]


@dataclass(frozen=True)
class HypothesisClass:
    """A finite, deduplicated, canonically ordered set of label tables."""

    n_domain: int
    n_labels: int
    members: tuple[Hypothesis, ...]
    table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_domain < 1 or self.n_labels < 1:
            raise InvariantViolation("domain and label sizes must be positive")
        canon = tuple(sorted({tuple(int(v) for v in h) for h in self.members}))
        if not canon:
            raise InvariantViolation("hypothesis class must be nonempty")
        for h in canon:
            if len(h) != self.n_domain:
                raise InvariantViolation(f"table length {len(h)} != n_domain {self.n_domain}")
            if min(h) < 0 or max(h) >= self.n_labels:
                raise InvariantViolation("label out of range in hypothesis table")
        object.__setattr__(self, "members", canon)
        arr = np.array(canon, dtype=np.int64).reshape(len(canon), self.n_domain)
        arr.setflags(write=False)
        object.__setattr__(self, "table", arr)

    @classmethod
    def from_tables(cls, tables: Iterable[Sequence[int]], n_labels: int | None = None) -> "HypothesisClass":
        tables = [tuple(int(v) for v in t) for t in tables]
        if not tables:
            raise InvariantViolation("hypothesis class must be nonempty")
        if n_labels is None:
            n_labels = max(max(t) for t in tables) + 1
        return cls(len(tables[0]), n_labels, tuple(tables))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def index(self, h: Sequence[int]) -> int:
        return self.members.index(tuple(int(v) for v in h))

    def project(self, points: Sequence[int]) -> set[tuple[int, ...]]:
        cols = self.table[:, list(points)]
        return {tuple(int(v) for v in row) for row in cols}

    def subclass(self, mask: np.ndarray) -> "HypothesisClass":
        rows = self.table[np.asarray(mask, dtype=bool)]
        return HypothesisClass(self.n_domain, self.n_labels, tuple(map(tuple, rows.tolist())))


@dataclass(frozen=True)
class Distribution:
    """Explicit probability table over (instance, label) pairs.

    ``exact`` optionally carries the same table as ``Fraction`` entries so
    that small constructions can be evaluated without rounding.
    """

    probs: np.ndarray
    exact: tuple[tuple[Fraction, ...], ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64)
        if p.ndim != 2:
            raise InvariantViolation("probability table must be two-dimensional")
        if (p < 0).any():
            raise InvariantViolation("negative probability")
        if abs(p.sum() - 1.0) > NORMALIZATION_TOL:
            raise InvariantViolation(f"probabilities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        if self.exact is not None:
            if sum(sum(row) for row in self.exact) != 1:
                raise InvariantViolation("exact probability table does not sum to 1")

    @classmethod
    def from_fractions(cls, table: Sequence[Sequence[Fraction]]) -> "Distribution":
        exact = tuple(tuple(Fraction(v) for v in row) for row in table)
        return cls(np.array([[float(v) for v in row] for row in exact]), exact)

    @property
    def n_domain(self) -> int:
        return self.probs.shape[0]

    @property
    def n_labels(self) -> int:
        return self.probs.shape[1]

    def mass(self, mask: np.ndarray, exact: bool = False):
        """Probability of the event given by a boolean ``n_domain x n_labels`` mask."""
        if exact:
            if self.exact is None:
                raise InvariantViolation("distribution has no exact table")
            return sum(
                (v for row, mrow in zip(self.exact, mask) for v, m in zip(row, mrow) if m),
                Fraction(0),
            )
        return float(self.probs[np.asarray(mask, dtype=bool)].sum())

    def marginal(self) -> np.ndarray:
        return self.probs.sum(axis=1)


@dataclass(frozen=True)
class Menu:
    """A finite label set per instance."""

    n_labels: int
    sets: tuple[frozenset[int], ...]
    mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sets = tuple(frozenset(int(y) for y in s) for s in self.sets)
        for s in sets:
            if any(y < 0 or y >= self.n_labels for y in s):
                raise InvariantViolation("menu label out of range")
        object.__setattr__(self, "sets", sets)
        m = np.zeros((len(sets), self.n_labels), dtype=bool)
        for x, s in enumerate(sets):
            m[x, list(s)] = True
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    @classmethod
    def full(cls, n_domain: int, n_labels: int) -> "Menu":
        return cls(n_labels, tuple(frozenset(range(n_labels)) for _ in range(n_domain)))

    @property
    def n_domain(self) -> int:
        return len(self.sets)

    @property
    def size(self) -> int:
        return max((len(s) for s in self.sets), default=0)

    def __contains__(self, pair: Example) -> bool:
        x, y = pair
        return int(y) in self.sets[int(x)]


def _check_dims(h: Sequence[int], n_domain: int) -> None:
    if len(h) != n_domain:
        raise InvariantViolation(f"hypothesis of length {len(h)} on a domain of size {n_domain}")


def error_mask(h: Sequence[int], n_labels: int) -> np.ndarray:
    """Boolean table marking pairs (x, y) with y != h(x)."""
    h = np.asarray(h, dtype=np.int64)
    mask = np.ones((len(h), n_labels), dtype=bool)
    mask[np.arange(len(h)), h] = False
    return mask


def error_rate(h: Sequence[int], P: Distribution, exact: bool = False):
    _check_dims(h, P.n_domain)
    return P.mass(error_mask(h, P.n_labels), exact=exact)


def empirical_error(h: Sequence[int], s: Sequence[Example]) -> Fraction:
    """Fraction of examples mislabeled by h; 0 on the empty sequence."""
    if not s:
        return Fraction(0)
    wrong = sum(1 for x, y in s if h[x] != y)
    return Fraction(wrong, len(s))


def realizable_subsequence(s: Sequence[Example], h: Sequence[int]) -> Sample:
    return tuple((x, y) for x, y in s if h[x] == y)


def realizes(h: Sequence[int], s: Sequence[Example]) -> bool:
    return all(h[x] == y for x, y in s)


def zero_one_loss(f: Sequence[int], z: Example) -> int:
    x, y = z
    return int(f[x] != y)


def masked_loss(hstar: Sequence[int], f: Sequence[int], z: Example) -> int:
    x, y = z
    return int(hstar[x] == y and f[x] != y)


def menu_loss(mu: Menu, f: Sequence[int], z: Example) -> int:
    x, y = z
    return int(y in mu.sets[x] and f[x] != y)


def empirical_menu_loss(mu: Menu, f: Sequence[int], s: Sequence[Example]) -> Fraction:
    if not s:
        return Fraction(0)
    return Fraction(sum(menu_loss(mu, f, z) for z in s), len(s))


def sample(P: Distribution, n: int, seed: SeedLike) -> Sample:
    """n i.i.d. draws from P, deterministic given the seed."""
    if n < 0:
        raise InvariantViolation("sample size must be nonnegative")
    if n == 0:
        return ()
    rng = make_rng(seed)
    flat = P.probs.ravel()
    cdf = np.cumsum(flat)
    u = rng.random(n) * cdf[-1]
    # side="right" never selects a zero-mass cell
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), flat.size - 1)
    xs, ys = np.divmod(idx, P.n_labels)
    return tuple(zip(xs.tolist(), ys.tolist()))


def class_errors(H: HypothesisClass, P: Distribution) -> np.ndarray:
    """Error rate of every member of H under P, in canonical order."""
    correct = P.probs[np.arange(H.n_domain)[None, :], H.table]
    return 1.0 - correct.sum(axis=1)


def best_in_class(H: HypothesisClass, P: Distribution, exact: bool = False):
    if H.n_domain != P.n_domain or H.n_labels != P.n_labels:
        raise InvariantViolation("class and distribution dimensions differ")
    if exact:
        errs = [error_rate(h, P, exact=True) for h in H.members]
        i = min(range(len(errs)), key=lambda j: (errs[j], j))
        return H.members[i], errs[i]
    errs = class_errors(H, P)
    i = int(np.argmin(errs))
    return H.members[i], float(errs[i])


def sample_arrays(s: Sequence[Example]) -> tuple[np.ndarray, np.ndarray]:
    if not s:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    arr = np.asarray(s, dtype=np.int64)
    return arr[:, 0], arr[:, 1]


def agreement_counts(H: HypothesisClass, s: Sequence[Example]) -> np.ndarray:
    """|s(h)| for every member h."""
    xs, ys = sample_arrays(s)
    if xs.size == 0:
        return np.zeros(len(H), dtype=np.int64)
    return (H.table[:, xs] == ys[None, :]).sum(axis=1)


def majority_vote(classifiers: Sequence[Sequence[int]], n_labels: int | None = None) -> Hypothesis:
    """Pointwise plurality; ties go to the smallest label."""
    if len(classifiers) == 0:
        raise InvariantViolation("majority vote of an empty sequence")
    arr = np.asarray(classifiers, dtype=np.int64)
    if n_labels is None:
        n_labels = int(arr.max()) + 1
    votes = np.zeros((n_labels, arr.shape[1]), dtype=np.int64)
    cols = np.arange(arr.shape[1])
    for row in arr:
        votes[row, cols] += 1
    return tuple(int(v) for v in votes.argmax(axis=0))
