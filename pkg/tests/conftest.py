import itertools
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from nicehfk.diagram import Diagram  # noqa: E402
from nicehfk.fixtures import NAMES, load_fixture  # noqa: E402


def genus_one_diagrams(vertices):
    """All genus-1 one-alpha/one-beta rotation systems with algebraic
    intersection +-1 (so the closed manifold is S^3), basepoints unset."""
    for perm in itertools.permutations(range(1, vertices)):
        beta = (0,) + perm
        for signs in itertools.product((1, -1), repeat=vertices):
            if abs(sum(signs)) != 1:
                continue
            d = Diagram((tuple(range(vertices)),), (beta,), signs, (0, 0), (0, 0))
            if d.genus == 1 and not d.problems():
                yield d


def placed(diagram, z_region, w_region):
    regs = diagram.regions
    return diagram.with_changes(z=regs[z_region].corners[0], w=regs[w_region].corners[0])


@pytest.fixture(scope="session")
def fixtures():
    return {name: load_fixture(name) for name in NAMES}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
