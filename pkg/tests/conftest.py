import numpy as np
import pytest

ACCEPTANCE_RESULTS: dict = {}


def record(criterion: str, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE_RESULTS[criterion] = (ok, detail)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    def order(name):
        tag = name.split()[0]
        return int(tag.rstrip("ab")), tag

    for name in sorted(ACCEPTANCE_RESULTS, key=order):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def full_svd_sensitivities(A, tau=1e-12):
    """Independent oracle: squared row norms of U from numpy's SVD of A."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    U, sig, _ = np.linalg.svd(A, full_matrices=False)
    if sig.size == 0 or sig[0] == 0:
        return np.zeros(A.shape[0]), 0
    r = int(np.sum(sig**2 > tau * sig[0] ** 2))
    return np.sum(U[:, :r] ** 2, axis=1), r
