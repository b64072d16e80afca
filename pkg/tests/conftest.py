import pytest

from surfdetect import fixtures
from surfdetect.manifold.cover import parse_perm_file
from surfdetect.manifold.triangulation import fundamental_group

# criterion number -> (passed, seconds, detail), filled by test_acceptance
ACCEPTANCE_RESULTS: dict = {}


@pytest.fixture(scope="session")
def fx():
    """Fixture objects by name, built once per session."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = fixtures.load(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def rep_of(fx):
    def get(name, label):
        f = fx(name)
        return parse_perm_file(f.perms[label], fundamental_group(f.tri))

    return get


@pytest.fixture(scope="session")
def data_dir():
    return fixtures.DATA_DIR


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, secs, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({secs:.2f} s) {detail}")
