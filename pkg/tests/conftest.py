import pytest

from hmpbounds import _backend, model

PAPER = (0.1, 0.1, 0.01)

BACKENDS = [pytest.param(_backend.fallback, id="numpy")]
if _backend.compiled is not None:
    BACKENDS.insert(0, pytest.param(_backend.compiled, id="cython"))


@pytest.fixture
def paper_params():
    return model.validate(*PAPER)


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return request.param


_ACCEPTANCE = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE:
        terminalreporter.write_line(line)
