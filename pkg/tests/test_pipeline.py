import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multipac.core import BudgetExceeded, HypothesisClass, InvariantViolation, error_rate, sample
from multipac.harness.generators import gen_appendix_a, gen_threshold_class, realizable_distribution
from multipac.listbound import menu_from_list
from multipac.pipeline import (
    MaplConfig,
    StageError,
    check_lineage,
    list_rounds,
    mapl,
    resolve_dimensions,
    run_mapl,
    run_mapl_sized,
    sample_size_calculator,
    split_thirds,
)


class TestSplit:
    def test_three(self):
        assert split_thirds(((0, 0), (1, 1), (2, 2))) == (((0, 0),), ((1, 1),), ((2, 2),))

    def test_ten(self):
        s = tuple((i, 0) for i in range(10))
        parts = split_thirds(s)
        assert [len(p) for p in parts] == [3, 3, 4] and sum(parts, ()) == s

    def test_two(self):
        with pytest.raises(InvariantViolation):
            split_thirds(((0, 0), (1, 1)))

    @given(st.integers(3, 200))
    def test_concatenation(self, n):
        s = tuple((i, 0) for i in range(n))
        a, b, c = split_thirds(s)
        assert a + b + c == s and len(a) == len(b) == n // 3


class TestConfig:
    @pytest.mark.parametrize("kw", [{"epsilon": 0}, {"delta": 1}, {"eta": 0}, {"mode": "x"}, {"cc_mode": "x"}])
    def test_rejects(self, kw):
        with pytest.raises(InvariantViolation):
            MaplConfig(**kw)

    def test_dimension_floor(self):
        H = HypothesisClass.from_tables([(1, 1)], 2)
        assert resolve_dimensions(H, MaplConfig()) == (1, 1)


class TestMapl:
    def test_singleton(self):
        H = HypothesisClass.from_tables([(2, 1, 0)], 3)
        s = ((0, 2), (1, 0), (2, 0), (0, 1), (1, 1), (2, 2))
        for mode in ("practical", "faithful"):
            assert mapl(s, H, MaplConfig(mode=mode)) == (2, 1, 0)

    def test_report_and_lineage(self):
        H, P = gen_appendix_a(11, 30)
        run = run_mapl(sample(P, 90, 3), H, MaplConfig(seed=4))
        r = run.report
        assert r["sizes"] == {"s1": 30, "s2": 30, "s3": 30} and r["entry"] == "split"
        assert r["list"]["length"] == 29 and r["cover"]["size"] == len(run.cover)
        assert check_lineage(run)
        assert run.menu == menu_from_list(run.list, 11, 30)
        assert r["final"]["compressed_size"] <= r["final"]["size_bound"]

    def test_tampered_lineage_detected(self):
        H, P = gen_appendix_a(5, 30)
        run = run_mapl(sample(P, 60, 1), H, MaplConfig())
        run.report["list"]["cover_digest"] = "0" * 16
        assert not check_lineage(run)

    def test_deterministic(self):
        H = gen_threshold_class(8)
        h = H.members[4]
        P = realizable_distribution(h, H.n_labels)
        s = sample(P, 60, 9)
        a, b = run_mapl(s, H, MaplConfig(seed=2)), run_mapl(s, H, MaplConfig(seed=2))
        assert a.hypothesis == b.hypothesis and a.report == b.report

    def test_list_trap_beats_list_objective(self):
        H, P = gen_appendix_a(11, 300)
        run = run_mapl(sample(P, 300, 0), H, MaplConfig(seed=0))
        assert error_rate(run.hypothesis, P) - 2 / 3 <= 0.1

    def test_sized_entry(self):
        H, P = gen_appendix_a(5, 30)
        s = sample(P, 40, 2)
        run = run_mapl_sized(s[:10], s[10:30], s[30:], H, MaplConfig())
        assert run.report["entry"] == "sized" and run.report["sizes"]["s2"] == 20 and len(run.list) == 19

    def test_empty_list_stage(self):
        H, _ = gen_appendix_a(5, 30)
        with pytest.raises(InvariantViolation):
            run_mapl_sized(((0, 0),), (), ((0, 0),), H)

    def test_stage_error_names_stage(self):
        H = HypothesisClass.from_tables([(0, 0), (1, 1)], 2)
        # literal enumeration over 10 positions exceeds the element budget
        s = ((0, 0), (1, 0)) * 15
        with pytest.raises(StageError) as err:
            run_mapl(s, H, MaplConfig(cc_mode="full", d_override=1, mode="faithful"))
        assert err.value.stage == "cover" and isinstance(err.value.__cause__, BudgetExceeded)

    @settings(max_examples=15)
    @given(st.integers(0, 10_000))
    def test_realizable_threshold_small_error(self, seed):
        H = gen_threshold_class(6)
        P = realizable_distribution(H.members[3], H.n_labels)
        h = mapl(sample(P, 90, seed), H, MaplConfig(seed=seed))
        assert error_rate(h, P) <= 0.5


class TestCalculator:
    def test_list_rounds(self):
        assert list_rounds(100, 0.1, 0.1) == 781
        assert list_rounds(60, 0.1, 0.2) == math.ceil((4 * math.log(60) + 14 * math.log(15) + 12) / 0.1)

    def test_n2_at_least_list_rounds(self):
        z = sample_size_calculator(3, 1, 0.1, 0.1, F_size=100)
        assert z.n2 >= 781
        assert z.n2 == math.ceil(8 * (2 * math.log(100) + 7 * math.log(90) + 6) / 0.1)

    def test_linear_in_inverse_epsilon(self):
        a = sample_size_calculator(3, 1, 0.1, 0.1, F_size=100).n2
        b = sample_size_calculator(3, 1, 0.05, 0.1, F_size=100).n2
        assert 2 * a - 1 <= b <= 2 * a + 1

    def test_order_level_labels(self):
        z = sample_size_calculator(2, 1, 0.2, 0.1)
        assert z.order_level == ("n1", "n3") and z.mode == "faithful"
        assert z.log_cover == pytest.approx((z.k1 + 1) * math.log(z.n1))

    def test_practical_scale(self):
        f = sample_size_calculator(2, 1, 0.2, 0.1, F_size=50)
        p = sample_size_calculator(2, 1, 0.2, 0.1, mode="practical", F_size=50)
        assert p.n2 == math.ceil(f.n2 * 0.01) and p.n1 >= 1 and p.n3 >= 1

    def test_validation(self):
        with pytest.raises(InvariantViolation):
            sample_size_calculator(0, 1, 0.1, 0.1)
        with pytest.raises(InvariantViolation):
            sample_size_calculator(1, 1, 1.5, 0.1)
