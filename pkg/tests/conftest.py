"""Shared fixtures; the expensive experiment runs are session-scoped."""
import time
from typing import NamedTuple

import numpy as np
import pytest

from diskperc.geometry import BoxSpec
from diskperc.pipeline import RunReport, RunSpec, default_p_grid, run
from diskperc.solver import SolverSettings

DESK_BOX = BoxSpec(side_length=10.24, lattice_size=256)
DESK_SEEDS = [1, 2, 3, 4, 5, 6]


class DeskRun(NamedTuple):
    out: str
    report: RunReport
    elapsed: float


def desk_spec(out_dir) -> RunSpec:
    return RunSpec(box_list=[DESK_BOX], seeds=list(DESK_SEEDS),
                   p_grid=default_p_grid(),
                   levels=[i / 10 for i in range(1, 10)],
                   solver=SolverSettings(), sigma_inf=1e-4,
                   output_dir=str(out_dir))


def _timed_run(out, workers: int) -> DeskRun:
    t0 = time.perf_counter()
    report = run(desk_spec(out), workers=workers, write_images=False)
    return DeskRun(str(out), report, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def desk_run(tmp_path_factory):
    """One complete desk-scale run (single worker), reused by several
    acceptance criteria.  Takes on the order of ten minutes."""
    return _timed_run(tmp_path_factory.mktemp("desk_a"), workers=1)


@pytest.fixture(scope="session")
def desk_run_twin(tmp_path_factory):
    """Second complete desk-scale run with a different worker count."""
    return _timed_run(tmp_path_factory.mktemp("desk_b"), workers=2)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260819)
