import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from multipac.core import HypothesisClass

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

ACCEPTANCE_LINES: dict[int, str] = {}


@st.composite
def small_classes(draw, max_domain=4, max_labels=4, max_size=12, min_labels=2):
    n = draw(st.integers(1, max_domain))
    K = draw(st.integers(min_labels, max_labels))
    rows = draw(st.lists(st.tuples(*[st.integers(0, K - 1)] * n), min_size=1, max_size=max_size))
    return HypothesisClass(n, K, tuple(rows))


@st.composite
def class_and_sample(draw, max_domain=4, max_labels=3, max_size=10, max_len=10):
    H = draw(small_classes(max_domain, max_labels, max_size))
    s = draw(st.lists(st.tuples(st.integers(0, H.n_domain - 1), st.integers(0, H.n_labels - 1)),
                      max_size=max_len))
    return H, tuple(s)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
