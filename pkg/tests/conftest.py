import pytest

from tietze import _kernels


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    """Run a test once per kernel backend, restoring the default afterwards."""
    old = _kernels.BACKEND
    if request.param == "numba" and not _kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(old)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
