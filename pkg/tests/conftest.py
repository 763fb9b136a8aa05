"""Session-scoped benchmark runs shared by the bench and acceptance suites.

The heavy cases (full bead training in particular) run once per session;
both suites assert against the same artifacts.
"""

import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dimreg import bench


@pytest.fixture(scope="session")
def table1_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("table1")
    t0 = time.time()
    reports = bench.table1_suite(seed=0, out_dir=str(out))
    return {"reports": reports, "out": out, "seconds": time.time() - t0}


@pytest.fixture(scope="session")
def logistic_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("logistic")
    report = bench.logistic_case(seed=0, out_dir=str(out))
    return {"report": report, "out": out}


@pytest.fixture(scope="session")
def bead_analytic_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("bead_analytic")
    t0 = time.time()
    report = bench.bead_case(seed=0, out_dir=str(out), use_upinn=False)
    return {"report": report, "out": out, "seconds": time.time() - t0}


@pytest.fixture(scope="session")
def bead_full_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("bead_full")
    t0 = time.time()
    report = bench.bead_case(seed=0, out_dir=str(out), use_upinn=True)
    return {"report": report, "out": out, "seconds": time.time() - t0}
