import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from finslerangle.background import make_model
from finslerangle.suites import draw_samples

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

MODEL_IDS = ("i", "ii", "iii", "iv")
CURVED = ("iii", "iv")


def model(mid="iv", c=1.0, g=1.2, dim=3, **kw):
    return make_model(mid, dim=dim, c=c, g=g, **kw)


def samples(m, count=5, seed=11):
    return draw_samples(m, seed, count)


@pytest.fixture(params=MODEL_IDS)
def any_model(request):
    return model(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def record_acceptance(number, title, ok, detail):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
