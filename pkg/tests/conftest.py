import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def positive_rationals(max_value=1000):
    return st.builds(
        Fraction, st.integers(1, max_value), st.integers(1, max_value)
    )


def rate_vectors(min_size=1, max_size=4):
    return st.lists(positive_rationals(), min_size=min_size, max_size=max_size)


def int_matrices(max_m=5, max_n=5, max_entry=9):
    def build(shape):
        m, n = shape
        return st.lists(
            st.lists(st.integers(0, max_entry), min_size=n, max_size=n),
            min_size=m,
            max_size=m,
        )

    return st.tuples(st.integers(1, max_m), st.integers(1, max_n)).flatmap(build)


def rand_rationals(rng, size):
    return [Fraction(rng.randint(1, 1000), rng.randint(1, 1000)) for _ in range(size)]


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
