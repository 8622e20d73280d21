import numpy as np
import pytest
from threadpoolctl import threadpool_limits

from tensvd import DenseTensor


@pytest.fixture(autouse=True, scope="session")
def single_thread():
    with threadpool_limits(limits=1):
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(20241018)


def random_tensor(rng, dims):
    return DenseTensor.from_array(rng.standard_normal(dims))


CRITERIA = []


def record_criterion(number, description, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {description}"
    if detail:
        line += f" ({detail})"
    CRITERIA.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(CRITERIA):
            terminalreporter.write_line(line)
