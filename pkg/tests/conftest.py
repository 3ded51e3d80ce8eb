import pytest

from hhverify.catalog import CATALOG

# (name, expression text, interval, kink locations)
CORPUS = [(e.name, e.source, e.interval, [0.3] if e.name == "abskink" else []) for e in CATALOG.values()]
CORPUS += [
    ("poly", "x^4 - 2*x^2 + 0.5*x", (-1.5, 1.5), []),
    ("rational", "1/(1 + x^2)", (-2.0, 2.0), []),
    ("mixed", "exp(-x) * cos(3*x) + sqrt(x)", (0.1, 3.0), []),
    ("vpower", "x^x", (0.2, 2.0), []),
]

_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Collects one pass/fail line per acceptance criterion."""
    stash = request.config.stash
    if _ACCEPTANCE_KEY not in stash:
        stash[_ACCEPTANCE_KEY] = []
    return stash[_ACCEPTANCE_KEY]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line)
