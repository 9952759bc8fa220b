import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import class_and_sample, small_classes
from multipac.core import HypothesisClass, InvariantViolation, NotRealizableError, realizes, sample_arrays
from multipac.dimensions import density
from multipac.oig import (
    build_oig,
    canonical_columns,
    clear_cache,
    min_max_outdegree_orientation,
    oig_learn,
    oig_learn_table,
    oig_predict,
)
from oracles import min_max_outdegree_oracle, oig_edges_oracle, random_class, realizable_sequences

SQUARE = list(itertools.product((0, 1), repeat=2))
CYCLE = [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 0)]


def edge_sets(G):
    return {(i, tuple(sorted(G.vertices[v] for v in e))) for i, e in G.edges}


class TestBuild:
    def test_square(self):
        G = build_oig(SQUARE, 2)
        assert len(G.vertices) == 4 and len(G.edges) == 4 and all(len(e) == 2 for _, e in G.edges)

    def test_single_vertex(self):
        G = build_oig([(0, 0)], 2)
        assert [len(e) for _, e in G.edges] == [1, 1]

    def test_cycle(self):
        G = build_oig(CYCLE, 2)
        assert len(G.vertices) == 6 and len(G.edges) == 6
        assert edge_sets(G) == oig_edges_oracle(CYCLE, 2)

    def test_wrong_length(self):
        with pytest.raises(InvariantViolation):
            build_oig([(0, 1), (0,)], 2)

    @given(small_classes(max_domain=3, max_labels=3))
    def test_matches_pairwise_oracle(self, H):
        assert edge_sets(build_oig(H.members, H.n_domain)) == oig_edges_oracle(H.members, H.n_domain)

    @given(small_classes(max_domain=3, max_labels=3))
    def test_edges_agree_off_direction(self, H):
        G = build_oig(H.members, H.n_domain)
        for i, e in G.edges:
            vs = [G.vertices[v] for v in e]
            assert all(u[:i] + u[i + 1:] == vs[0][:i] + vs[0][i + 1:] for u in vs)


class TestOrientation:
    def test_single_edge(self):
        assert min_max_outdegree_orientation(build_oig([(0,), (1,)], 1))[1] == 1

    def test_square(self):
        assert min_max_outdegree_orientation(build_oig(SQUARE, 2))[1] == 1

    def test_singletons(self):
        sigma, k = min_max_outdegree_orientation(build_oig([(0, 0)], 2))
        assert k == 0 and sigma.assignment == (0, 0)

    def test_square_brute_force(self):
        G = build_oig(SQUARE, 2)
        from multipac.oig import Orientation

        best = min(Orientation(a).max_outdegree(G) for a in itertools.product(*[e for _, e in G.edges]))
        assert best == 1

    @given(small_classes(max_domain=3, max_labels=3, max_size=10))
    def test_valid_and_optimal(self, H):
        G = build_oig(H.members, H.n_domain)
        sigma, k = min_max_outdegree_orientation(G)
        assert all(t in e for (_, e), t in zip(G.edges, sigma.assignment))
        assert k == sigma.max_outdegree(G)
        assert k == min_max_outdegree_oracle(H.members, H.n_domain)

    def test_deterministic(self):
        G = build_oig(CYCLE, 2)
        assert min_max_outdegree_orientation(G) == min_max_outdegree_orientation(G)


class TestPredict:
    def test_single_member(self):
        H = HypothesisClass.from_tables([(2, 0, 1)], 3)
        assert [oig_predict((), H, x) for x in range(3)] == [2, 0, 1]

    def test_agreeing_members(self):
        H = HypothesisClass.from_tables([(0, 1, 1), (1, 1, 0)], 2)
        assert oig_predict(((0, 0),), H, 1) == 1

    def test_cube_leave_one_out(self):
        H = HypothesisClass.from_tables(SQUARE, 2)
        y = oig_predict(((0, 0),), H, 1)
        assert y in (0, 1)
        bound = Fraction(math.ceil(density(H, 2).value), 2)
        for z in realizable_sequences(H, 2):
            miss = sum(oig_learn(z[:j] + z[j + 1:], H)[z[j][0]] != z[j][1] for j in range(2))
            assert Fraction(miss, 2) <= bound

    def test_conflicting_labels(self):
        H = HypothesisClass.from_tables(SQUARE, 2)
        with pytest.raises(NotRealizableError):
            oig_predict(((0, 0), (0, 1)), H, 1)

    def test_unrealizable(self):
        H = HypothesisClass.from_tables([(0, 0), (1, 1)], 2)
        with pytest.raises(NotRealizableError):
            oig_predict(((0, 0), (1, 1)), H, 1)
        assert oig_learn_table(*sample_arrays(((0, 0), (1, 1))), H.table) is None

    def test_query_outside_domain(self):
        H = HypothesisClass.from_tables(SQUARE, 2)
        with pytest.raises(InvariantViolation):
            oig_predict((), H, 5)

    @given(class_and_sample())
    def test_learn_matches_predict_and_fits(self, hs):
        H, s = hs
        h = H.members[0]
        s = tuple((x, h[x]) for x, _ in s)
        full = oig_learn(s, H)
        assert realizes(full, s)
        assert full == tuple(oig_predict(s, H, x) for x in range(H.n_domain))

    @given(class_and_sample(), st.randoms(use_true_random=False))
    def test_order_invariant(self, hs, rnd):
        H, s = hs
        h = H.members[-1]
        s = [(x, h[x]) for x, _ in s]
        t = list(s)
        rnd.shuffle(t)
        assert oig_learn(s, H) == oig_learn(t, H)

    def test_cache_does_not_change_predictions(self):
        rng = np.random.default_rng(3)
        H = random_class(rng, 4, 3, 20)
        s = tuple((x, H.members[0][x]) for x in (0, 1, 0))
        a = oig_learn(s, H)
        clear_cache()
        assert oig_learn(s, H) == a


class TestCanonicalLayout:
    def test_repeats_capped_at_two(self):
        assert canonical_columns([3, 1, 3, 3], 2) == ([1, 2, 3, 3], 1)

    def test_query_first(self):
        assert canonical_columns([4, 5], 0) == ([0, 4, 5], 0)


class TestLeaveOneOut:
    def test_seeded_audit(self):
        rng = np.random.default_rng(77)
        for _ in range(25):
            H = random_class(rng, max_domain=3, max_labels=3, max_size=15)
            for n in (1, 2):
                bound = Fraction(math.ceil(density(H, n + 1).value), n + 1)
                for z in realizable_sequences(H, n + 1):
                    miss = sum(oig_learn(z[:j] + z[j + 1:], H)[z[j][0]] != z[j][1] for j in range(n + 1))
                    assert Fraction(miss, n + 1) <= bound
