import functools

import numpy as np
import pytest

from ctht import spectral as sp
from ctht.families import make_function, spectral_quadrature_for
from ctht.hypergroup import JacobiParams

PARAM_SETS = [(0.5, 0.5), (1.0, 0.0), (2.0, 0.5)]


@functools.lru_cache(maxsize=None)
def bundled(name, scale=1.0, dilation=1.0):
    return make_function(name, scale=scale, dilation=dilation)


@functools.lru_cache(maxsize=None)
def spectrum_of(name, alpha, beta):
    params = JacobiParams(alpha, beta)
    return sp.forward_transform(bundled(name), params, spectral_quadrature_for(name))


@pytest.fixture
def half():
    return JacobiParams(0.5, 0.5)


@pytest.fixture(params=PARAM_SETS, ids=lambda ab: f"a{ab[0]:g}_b{ab[1]:g}")
def params(request):
    return JacobiParams(*request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# criterion number -> list of (part, ok, detail); filled by test_acceptance
ACCEPTANCE = {}


def record(criterion, part, ok, detail=""):
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(ok), detail))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        verdict = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        detail = "; ".join(f"{name} {'ok' if ok else 'FAILED'}{' (' + d + ')' if d else ''}"
                           for name, ok, d in parts)
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  {detail}")
