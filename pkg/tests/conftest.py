import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

entries = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def square_matrices(draw, min_dim=2, max_dim=8):
    v = draw(st.integers(min_dim, max_dim))
    return draw(arrays(np.float64, (v, v), elements=entries))


@st.composite
def symmetric_matrices(draw, min_dim=2, max_dim=8):
    a = draw(square_matrices(min_dim, max_dim))
    return 0.5 * (a + a.T)


@st.composite
def square_pairs(draw, min_dim=2, max_dim=8):
    v = draw(st.integers(min_dim, max_dim))
    a = draw(arrays(np.float64, (v, v), elements=entries))
    b = draw(arrays(np.float64, (v, v), elements=entries))
    return a, b


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance verdict line, then assert it."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
