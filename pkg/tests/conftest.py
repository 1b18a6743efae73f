import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fusionwalk.families import FamilySpec, build, cyclic, klein_four
from oracles import s3_table

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# finite built-ins used across the suite
FINITE_SPECS = [FamilySpec("verlinde_su2", {"level": k}) for k in range(1, 9)] + [
    cyclic(2),
    cyclic(3),
    cyclic(5),
    klein_four(),
    FamilySpec("group_table", {"table": s3_table()}),
    FamilySpec("product", {"left": FamilySpec("verlinde_su2", {"level": 2}), "right": cyclic(3)}),
]


def spec_id(spec):
    return "S3" if "table" in spec.params else str(spec)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=FINITE_SPECS, ids=spec_id)
def finite_ring(request):
    return build(request.param)


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
