import sys
import warnings

import numpy as np
import pytest

from mfdxa.detrending import build_scale_grid
from mfdxa.fluctuation import MomentGrid, mfdfa
from mfdxa.series import standardize
from mfdxa.spectra import fit_hurst, multifractality_degree
from mfdxa.synth import GeneratorSpec, gen_white_noise


@pytest.fixture(scope="session")
def default_moments():
    return MomentGrid.regular()


@pytest.fixture(scope="session")
def white_noise_runs(default_moments):
    """h(2) and Delta h of 100 white-noise series of length 4096."""
    grid = build_scale_grid(4096)
    h2, dh = [], []
    for seed in range(100):
        x = standardize(gen_white_noise(GeneratorSpec("white_noise", 4096, seed=seed)))
        hs = fit_hurst(mfdfa(x, grid, default_moments))
        h2.append(hs.at(2.0))
        dh.append(multifractality_degree(hs))
    return np.array(h2), np.array(dh)


@pytest.fixture(autouse=True)
def _quiet_farima_tail():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="FARIMA d=")
        yield


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
