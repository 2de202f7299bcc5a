import itertools
from pathlib import Path

import pytest

import clinguin
from clinguin.solver import ProgramBundle, SolverBridge

ASSETS = Path(clinguin.__file__).parent / "assets"
DOMAIN_FILES = [str(ASSETS / "ins.lp"), str(ASSETS / "enc.lp")]
UI_TABLES = [str(ASSETS / "ui-tables.lp")]
UI_FULL = [
    str(ASSETS / name)
    for name in ("ui-tables.lp", "ui-menu.lp", "ui-people.lp")
]
UI_EXPLAIN = [
    str(ASSETS / name)
    for name in (
        "ui-tables.lp",
        "ui-menu.lp",
        "ui-people.lp",
        "ui-explain.lp",
        "ui-explain-msg.lp",
    )
]

# The seating instance, restated independently of any ASP source: three
# people with pet preferences, two tables with three chairs each.
PEOPLE = {"alexander": "cat", "susana": "cat", "torsten": "dog"}
SEATS = [(t, c) for t in (1, 2) for c in (1, 2, 3)]


def seating_models():
    """All valid seatings as frozensets of (person, (table, chair)) pairs.

    Brute force over injective person->seat maps, keeping those where each
    table hosts a single pet preference and occupied chairs per table have
    no gap (chairs 1 and 3 taken with 2 empty is invalid).
    """
    names = sorted(PEOPLE)
    models = []
    for seats in itertools.permutations(SEATS, len(names)):
        assignment = dict(zip(names, seats))
        ok = True
        for table in (1, 2):
            there = [p for p, (t, _) in assignment.items() if t == table]
            if len({PEOPLE[p] for p in there}) > 1:
                ok = False
                break
            chairs = {c for p in there for (t, c) in [assignment[p]]}
            if chairs == {1, 3}:
                ok = False
                break
        if ok:
            models.append(frozenset(assignment.items()))
    return models


# verdicts collected by the acceptance suite, one line per criterion
acceptance_results: list = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    for name, ok in acceptance_results:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}: {name}")


@pytest.fixture(scope="session")
def bridge():
    return SolverBridge()


@pytest.fixture(scope="session")
def domain_bundle():
    return ProgramBundle.from_files(DOMAIN_FILES)
