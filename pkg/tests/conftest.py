import pytest

from levelcross import IntegratorConfig, ModelSpec, solve


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    # first call compiles the numba propagation kernel; keep JIT time out
    # of the acceptance runtime budgets
    solve(ModelSpec.lz(1.0), IntegratorConfig(max_time=20.0))
