import numpy as np
import pytest
from hypothesis import strategies as st

from d2dpush.model import GroupParams, SystemConfig, validate


def make_config(w, rho_in, rho_out=None, density=0.05, radius=5.0):
    rho_out = rho_in if rho_out is None else rho_out
    groups = [GroupParams(density, float(a), float(b), float(c))
              for a, b, c in zip(w, rho_in, rho_out)]
    return validate(SystemConfig(tuple(groups), radius))


def random_shared_config(rng, M, density=0.05, radius=5.0):
    w = rng.uniform(0.05, 1.0, M)
    rho = rng.uniform(0.02, 1.0, M)
    return make_config(w, rho, density=density, radius=radius)


def random_general_config(rng, M, density=0.05, radius=5.0):
    w = rng.uniform(0.0, 1.0, M)
    ro = rng.uniform(0.0, 0.3, M)
    ri = rng.uniform(0.7, 1.0, M)
    return make_config(w, ri, ro, density=density, radius=radius)


prob = st.floats(0.0, 1.0, allow_nan=False)


@st.composite
def configs(draw, min_groups=1, max_groups=4, shared=False):
    M = draw(st.integers(min_groups, max_groups))
    groups = []
    for _ in range(M):
        lam = draw(st.floats(0.0, 0.2))
        w = draw(prob)
        ri = draw(prob)
        ro = ri if shared else draw(st.floats(0.0, ri))
        groups.append(GroupParams(lam, w, ri, ro))
    r = draw(st.floats(0.5, 10.0))
    return validate(SystemConfig(tuple(groups), r))


@st.composite
def config_and_strategy(draw, **kw):
    cfg = draw(configs(**kw))
    c = np.array(draw(st.lists(prob, min_size=cfg.n_groups, max_size=cfg.n_groups)))
    return cfg, c


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
