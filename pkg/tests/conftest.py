"""Shared fixtures and the acceptance-criteria summary hook."""

import numpy as np
import pytest

from neurolasso import build_instance

# criterion number -> (passed, detail); filled by tests/test_acceptance.py
CRITERIA_RESULTS = {}


def record_criterion(number, passed, detail=""):
    prev = CRITERIA_RESULTS.get(number)
    if prev is not None:
        passed = passed and prev[0]
        detail = "; ".join(filter(None, [prev[1], detail]))
    CRITERIA_RESULTS[number] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERIA_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA_RESULTS):
        passed, detail = CRITERIA_RESULTS[n]
        line = f"CRITERION {n}: {'PASS' if passed else 'FAIL'}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)


def random_instance(seed, n=12, l=6, lam_factor=0.3, matrix_free=False):
    """Seeded Gaussian instance with lam scaled off ||A^T b||_inf."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, l))
    b = rng.standard_normal(n)
    lam = lam_factor * float(np.abs(A.T @ b).max())
    inst, cache = build_instance(A, b, lam, matrix_free=matrix_free)
    return inst, cache


@pytest.fixture
def identity_instance():
    """The worked example used throughout: A = I2, b = (2, 0.3), lam = 1."""
    return build_instance(np.eye(2), np.array([2.0, 0.3]), 1.0)
