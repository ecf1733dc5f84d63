"""Shared fixtures and hypothesis settings for the test suite."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from schwarz_coupling import (
    ConstantForcing,
    CouplingConfig,
    GaussianSine,
    build_rectangle,
    lambda_opt,
    split_at_interface,
)

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


RECT1 = {"L": 20.0, "H": 0.5, "kappa": 0.001}
FUNNEL2 = {"channel_len": 2.0, "H": 0.05, "expansion_len": 1.0, "l": 3.0, "kappa": 0.001}


@pytest.fixture(scope="session")
def coarse_rect_domain():
    # 20 x 0.5 strip at hx = 0.2, hz = 0.1: big enough to split anywhere tested
    return build_rectangle(RECT1["L"], RECT1["H"], 100, 5)


@pytest.fixture(scope="session")
def coarse_rect_config(coarse_rect_domain):
    split = split_at_interface(coarse_rect_domain, 16.0)
    lam = lambda_opt(RECT1["kappa"], RECT1["H"], 16.0)
    return CouplingConfig(
        split=split,
        kappa=RECT1["kappa"],
        lam=lam,
        forcing=GaussianSine(m=1.0, x_star=19.0),
        tol=1e-8,
        max_iter=60,
    )


@pytest.fixture(scope="session")
def tiny_rect_config():
    # smallest geometry that still exercises both solvers end to end
    dom = build_rectangle(4.0, 1.0, 16, 4)
    split = split_at_interface(dom, 2.0)
    return CouplingConfig(
        split=split,
        kappa=0.01,
        lam=lambda_opt(0.01, 1.0, 2.0),
        forcing=ConstantForcing(1.0),
        tol=1e-10,
        max_iter=40,
    )


def fields_close(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    return bool(np.max(np.abs(a - b)) <= tol)
