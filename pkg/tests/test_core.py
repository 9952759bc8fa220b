import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import class_and_sample, small_classes
from multipac.core import (
    Distribution,
    HypothesisClass,
    InvariantViolation,
    Menu,
    best_in_class,
    derive_seed,
    empirical_error,
    error_rate,
    majority_vote,
    masked_loss,
    menu_loss,
    realizable_subsequence,
    realizes,
    sample,
    zero_one_loss,
)
from multipac.harness.generators import gen_appendix_a


def uniform_pairs():
    return Distribution(np.array([[0.5, 0.0], [0.0, 0.5]]))


class TestErrorRate:
    def test_constant_on_uniform_pairs(self):
        assert error_rate((0, 0), uniform_pairs()) == 0.5

    def test_realizer_has_zero_error(self):
        assert error_rate((0, 1), uniform_pairs()) == 0.0

    def test_list_trap_constant_zero_exact(self):
        H, P = gen_appendix_a(11, 300)
        assert error_rate(H.members[0], P, exact=True) == Fraction(2, 3)

    def test_dimension_mismatch(self):
        with pytest.raises(InvariantViolation):
            error_rate((0, 0, 0), uniform_pairs())


class TestEmpirical:
    def test_realizing(self):
        assert empirical_error((0, 1), ((0, 0), (1, 1))) == 0

    def test_half(self):
        assert empirical_error((0,), ((0, 0), (0, 1))) == Fraction(1, 2)

    def test_all_wrong(self):
        assert empirical_error((1, 1), ((0, 0), (1, 0))) == 1

    def test_empty_is_zero(self):
        assert empirical_error((0,), ()) == 0


class TestRealizableSubsequence:
    def test_identity_when_realized(self):
        s = ((0, 0), (1, 1))
        assert realizable_subsequence(s, (0, 1)) == s

    def test_empty_when_no_agreement(self):
        assert realizable_subsequence(((0, 1),), (0,)) == ()

    def test_filter_keeps_order_and_duplicates(self):
        s = ((0, 0), (1, 5), (0, 0))
        assert realizable_subsequence(s, (0, 3)) == ((0, 0), (0, 0))


class TestLosses:
    def test_masked_loss_table(self):
        assert masked_loss((1,), (1,), (0, 1)) == 0
        assert masked_loss((1,), (2,), (0, 1)) == 1
        assert masked_loss((0,), (2,), (0, 1)) == 0

    def test_menu_loss_table(self):
        mu = Menu(3, (frozenset({1, 2}),))
        assert menu_loss(mu, (1,), (0, 0)) == 0
        assert menu_loss(mu, (1,), (0, 1)) == 0
        assert menu_loss(mu, (2,), (0, 1)) == 1

    @given(class_and_sample())
    def test_full_menu_is_zero_one(self, hs):
        H, s = hs
        mu = Menu.full(H.n_domain, H.n_labels)
        for f in H.members:
            for z in s:
                assert menu_loss(mu, f, z) == zero_one_loss(f, z)

    @given(class_and_sample())
    def test_masked_loss_self_is_zero(self, hs):
        H, s = hs
        for h in H.members:
            assert all(masked_loss(h, h, z) == 0 for z in s)

    @given(class_and_sample())
    def test_realizable_subsequence_is_realized(self, hs):
        H, s = hs
        for h in H.members:
            sub = realizable_subsequence(s, h)
            assert empirical_error(h, sub) == 0 and realizes(h, sub)


class TestSample:
    def test_empty(self):
        assert sample(uniform_pairs(), 0, 1) == ()

    def test_point_mass(self):
        P = Distribution(np.array([[0.0, 0.0], [0.0, 1.0]]))
        assert sample(P, 7, 3) == ((1, 1),) * 7

    def test_deterministic(self):
        assert sample(uniform_pairs(), 50, 9) == sample(uniform_pairs(), 50, 9)

    def test_never_draws_zero_mass_cells(self):
        P = Distribution(np.array([[0.0, 0.3], [0.7, 0.0]]))
        assert set(sample(P, 2000, 4)) <= {(0, 1), (1, 0)}

    def test_error_rate_matches_monte_carlo(self):
        # Hoeffding radius with a factor of 3, n = 1e5, delta = 0.01
        n, delta = 100_000, 0.01
        radius = 3 * math.sqrt(math.log(2 / delta) / (2 * n))
        rng = np.random.default_rng(7)
        for trial in range(20):
            probs = rng.random((5, 3))
            P = Distribution(probs / probs.sum())
            h = tuple(int(v) for v in rng.integers(0, 3, 5))
            s = sample(P, n, derive_seed(11, trial))
            est = sum(1 for x, y in s if h[x] != y) / n
            assert abs(est - error_rate(h, P)) <= radius


class TestBestInClass:
    def test_list_trap(self):
        H, P = gen_appendix_a(11, 300)
        h, err = best_in_class(H, P, exact=True)
        assert h == (0,) * 300 and err == Fraction(2, 3)

    def test_realizer_zero(self):
        H = HypothesisClass.from_tables([(0, 0), (0, 1)], 2)
        assert best_in_class(H, uniform_pairs())[1] == 0.0

    def test_tie_goes_to_canonical_first(self):
        H = HypothesisClass.from_tables([(1, 1), (0, 0)], 2)
        assert best_in_class(H, uniform_pairs())[0] == (0, 0)

    @given(small_classes())
    def test_error_in_unit_interval(self, H):
        probs = np.arange(1, H.n_domain * H.n_labels + 1, dtype=float).reshape(H.n_domain, H.n_labels)
        P = Distribution(probs / probs.sum())
        for h in H.members:
            assert -1e-12 <= error_rate(h, P) <= 1 + 1e-12


class TestTypes:
    def test_class_dedup_and_order(self):
        H = HypothesisClass(2, 2, ((1, 0), (0, 1), (1, 0)))
        assert H.members == ((0, 1), (1, 0))

    @pytest.mark.parametrize("rows", [(), ((0, 2),), ((0,), (0, 1))])
    def test_class_rejects_bad_tables(self, rows):
        with pytest.raises(InvariantViolation):
            HypothesisClass(2, 2, rows)

    def test_distribution_normalization(self):
        with pytest.raises(InvariantViolation):
            Distribution(np.array([[0.5, 0.4]]))
        with pytest.raises(InvariantViolation):
            Distribution(np.array([[1.5, -0.5]]))

    def test_menu_size(self):
        mu = Menu(4, (frozenset({0, 1}), frozenset({3}), frozenset()))
        assert mu.size == 2 and (0, 1) in mu and (2, 0) not in mu

    def test_derive_seed_stable(self):
        assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3) != derive_seed(1, 2, 4)


class TestMajorityVote:
    def test_single(self):
        assert majority_vote([(2, 0, 1)]) == (2, 0, 1)

    def test_two_of_three(self):
        assert majority_vote([(1, 0), (1, 2), (0, 2)]) == (1, 2)

    def test_tie_to_smaller_label(self):
        assert majority_vote([(3,), (1,)]) == (1,)

    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=9))
    def test_plurality(self, rows):
        out = majority_vote(rows, 4)
        for i in range(2):
            counts = [sum(1 for r in rows if r[i] == y) for y in range(4)]
            assert out[i] == counts.index(max(counts))
