import pytest

from planarmop.moments import MomentTables
from planarmop.reference import reference_configs


@pytest.fixture(scope="session")
def refs():
    return reference_configs()


@pytest.fixture(scope="session")
def tables(refs):
    """Shared moment tables for the reference configurations."""
    return {name: MomentTables(cfg) for name, cfg in refs.items()}


_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[k]["line"])
