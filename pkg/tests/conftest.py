import sys

import numpy as np
import pytest

from quartic_finsler import catalog
from quartic_finsler.lagrangian import Branch, LagrangianSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def spec_of(name, branch=Branch.SIGNED, k=None):
    return catalog.preset_spec(name, branch, k)


def random_offnull(spec, rng, count, margin=1e-2):
    """Random directions whose |Q| / |v|^4 exceeds ``margin * max|M|``."""
    out = []
    while len(out) < count:
        v = rng.normal(size=spec.dim)
        q = spec.quartic.eval(v)
        if abs(q) > margin * float(v @ v) ** 2 * spec.quartic.max_abs:
            out.append(v)
    return np.array(out)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
