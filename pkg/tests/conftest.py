import numpy as np
import pytest

from dfwlearn.objectives import AtomMatrix, KernelSpec, Lasso, SvmDual


def make_lasso(n=200, d=50, seed=0):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((d, n))
    y = rng.standard_normal(d)
    return Lasso(AtomMatrix(A), y)


def make_svm(n=100, d=5, seed=0, C=10.0, kernel=None):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((d, n))
    labels = np.where(X[0] + 0.3 * rng.standard_normal(n) > 0, 1.0, -1.0)
    return SvmDual(X, labels, kernel, C)


@pytest.fixture
def lasso():
    return make_lasso()


@pytest.fixture
def svm():
    return make_svm()


@pytest.fixture
def linear_kernel():
    return KernelSpec("linear")


# ------------------------------------------------------------------ acceptance report

_ACCEPTANCE: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, name): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or report.when == "teardown":
        return
    key = mark.args
    _ACCEPTANCE[key] = _ACCEPTANCE.get(key, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (number, name), ok in sorted(_ACCEPTANCE.items()):
        terminalreporter.write_line(f"ACCEPTANCE {number:2d} {name}: {'PASS' if ok else 'FAIL'}")
