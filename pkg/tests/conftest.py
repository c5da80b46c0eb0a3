import warnings

import pytest

from hyperpack.hypergraph import complete_kgraph, derive_params, generate_random_kgraph


def params(k, ell, n):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return derive_params(k, ell, n)


@pytest.fixture
def k3n8():
    return complete_kgraph(8, 3), params(3, 1, 8)


@pytest.fixture
def k3n12():
    return complete_kgraph(12, 3), params(3, 1, 12)


@pytest.fixture
def rand12():
    return generate_random_kgraph(12, 3, 0.9, seed=1), params(3, 1, 12)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
