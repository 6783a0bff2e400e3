import numpy as np
import pytest

import cosra
from tests.acceptance_report import ACCEPTANCE_RESULTS


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if ok else "FAIL"
        line = f"{status}  {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def leslie():
    return cosra.leslie_benchmark()


@pytest.fixture(scope="session")
def leslie_cone(leslie):
    return cosra.build_invariant_cone(leslie)


@pytest.fixture(scope="session")
def leslie_pipeline_m15(leslie, leslie_cone):
    """Small solved pipeline reused by operator-level tests."""
    grid = cosra.generate_grid(leslie, leslie_cone, 15)
    tableau = cosra.build_tableau(leslie, grid)
    return leslie, grid, tableau


@pytest.fixture(scope="session")
def leslie_solved_m40(leslie, leslie_cone):
    grid = cosra.generate_grid(leslie, leslie_cone, 40)
    tableau = cosra.build_tableau(leslie, grid)
    result = cosra.rvi_km_solve(leslie, grid, tableau, stop=0.01)
    return leslie, grid, tableau, result


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def single_pair_game(rng, low=0.8, high=1.2, d=3):
    """Random one-action-per-player game with a strictly positive pair product."""
    A = rng.uniform(low, high, size=(d, d))
    B = rng.uniform(low, high, size=(d, d))
    return cosra.game_from_matrices([A], [B])


def random_section_point(rng, d, e_star=None):
    x = rng.dirichlet(np.ones(d))
    if e_star is None:
        return x
    return x / (x @ np.asarray(e_star))
