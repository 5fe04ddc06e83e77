import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from replicadiv import Component, ComponentCategory, Configuration, Population, Replica

SS = ComponentCategory.SYSTEM_SOFTWARE
TH = ComponentCategory.TRUSTED_HARDWARE
AW = ComponentCategory.APPLICATION_WALLET
AC = ComponentCategory.APPLICATION_CONSENSUS


def os_config(name, version="1"):
    return Configuration.of(Component(SS, name, version))


def make_population(powers, configs=None, operators=None):
    """Replicas r00, r01, ... with the given powers.

    `configs` is a list of config labels (same label -> same configuration);
    defaults to one unique configuration per replica.
    """
    n = len(powers)
    configs = configs or [f"c{i}" for i in range(n)]
    operators = operators or [f"op{i}" for i in range(n)]
    width = len(str(n))
    return Population.from_replicas(
        Replica(f"r{i:0{width}d}", operators[i], os_config(configs[i]), powers[i]) for i in range(n)
    )


@pytest.fixture
def uniform8():
    return make_population([1] * 8)


@pytest.fixture
def pool_csv():
    return (Path(__file__).parents[1] / "src/replicadiv/data/bitcoin_pools_2023-02-02.csv").read_text()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
