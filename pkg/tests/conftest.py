import warnings

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_CRITERIA = {}


@pytest.fixture(scope="session")
def criterion():
    """``criterion(k, passed, detail)`` records one acceptance line."""

    def record(k, passed, detail=""):
        _CRITERIA[k] = (bool(passed), detail)
        print(f"criterion {k}: {'PASS' if passed else 'FAIL'} {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        passed, detail = _CRITERIA[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def bessel3():
    from persistkit.chains import BesselLikeSpec, make_bessel_like

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return make_bessel_like(BesselLikeSpec(delta=3.0, laziness=0.3))
