from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

REFERENCE_COUPLINGS = [Fraction(1, 3), Fraction(1, 2), Fraction(9, 10)]


@pytest.fixture(params=REFERENCE_COUPLINGS, ids=lambda g: f"g={g}")
def ref_g(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
