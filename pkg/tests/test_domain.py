import pytest

from clinguin.backends import get_backend
from clinguin.domain import (
    ConflictingTruth,
    DomainSession,
    InvalidConfig,
    NoSolution,
    UnknownExternal,
    snapshot_facts,
)
from clinguin.solver import MODELS_ALL
from clinguin.terms import parse_term

from conftest import DOMAIN_FILES


def make_session(bridge, backend="ClingoBackend", options=None, files=None):
    return DomainSession(
        DOMAIN_FILES if files is None else files,
        backend=get_backend(backend),
        bridge=bridge,
        options=options or {},
    )


@pytest.fixture
def session(bridge):
    return make_session(bridge)


# -- configuration ----------------------------------------------------------


def test_requires_files(bridge):
    with pytest.raises(InvalidConfig):
        make_session(bridge, files=[])


def test_missing_file(bridge):
    with pytest.raises(InvalidConfig):
        make_session(bridge, files=["/nonexistent.lp"])


def test_bad_program_fails_fast(bridge, tmp_path):
    path = tmp_path / "bad.lp"
    path.write_text("p(X) :- not q(X).\n")
    with pytest.raises(Exception):
        make_session(bridge, files=[str(path)])


# -- snapshots and mutations ------------------------------------------------


def test_initial_snapshot(session):
    snap = session.compute_snapshot()
    assert snap.status == "sat"
    assert not snap.browsing and not snap.assumptions
    assert set(snap.cautious) <= set(snap.brave)
    assert set(snap.cautious) <= set(snap.model) <= set(snap.brave)


def test_snapshot_cached_per_revision(session):
    assert session.compute_snapshot() is session.compute_snapshot()
    first = session.compute_snapshot()
    session.add_assumption(parse_term("assign(alexander,(1,1))"), True)
    assert session.compute_snapshot() is not first


def test_add_and_remove_assumption(session):
    atom = parse_term("assign(alexander,(1,1))")
    session.add_assumption(atom, True)
    snap = session.compute_snapshot()
    assert snap.assumptions == ((atom, True),)
    assert atom in snap.cautious
    session.remove_assumption(atom)
    assert session.compute_snapshot().assumptions == ()


def test_conflicting_truth(session):
    atom = parse_term("assign(alexander,(1,1))")
    session.add_assumption(atom, True)
    with pytest.raises(ConflictingTruth):
        session.add_assumption(atom, False)
    session.add_assumption(atom, True)  # same truth value is fine


def test_clear_assumptions(session):
    session.add_assumption(parse_term("assign(alexander,(1,1))"), True)
    session.clear_assumptions()
    assert session.compute_snapshot().assumptions == ()


def test_added_atoms_enter_models(session):
    session.add_atom(parse_term('person("ada",dog)'))
    snap = session.compute_snapshot()
    assert parse_term('person("ada",dog)') in snap.model
    session.remove_atom(parse_term('person("ada",dog)'))
    assert parse_term('person("ada",dog)') not in session.compute_snapshot().model


def test_externals(bridge, tmp_path):
    path = tmp_path / "ext.lp"
    path.write_text("#external night.\nlamp :- night.\n")
    session = make_session(bridge, files=[str(path)])
    assert parse_term("lamp") not in session.compute_snapshot().model
    session.set_external(parse_term("night"), "true")
    assert parse_term("lamp") in session.compute_snapshot().model
    session.set_external(parse_term("night"), "false")
    assert parse_term("lamp") not in session.compute_snapshot().model
    with pytest.raises(UnknownExternal):
        session.set_external(parse_term("day"), "true")


def test_restart(session):
    session.add_assumption(parse_term("assign(alexander,(1,1))"), True)
    session.add_atom(parse_term('person("ada",cat)'))
    before = session.revision
    session.restart()
    assert session.revision > before
    snap = session.compute_snapshot()
    assert snap.assumptions == () and parse_term('person("ada",cat)') not in snap.model


def test_revision_monotone(session):
    seen = [session.revision]
    session.add_assumption(parse_term("assign(alexander,(1,1))"), True)
    seen.append(session.revision)
    session.next_solution()
    seen.append(session.revision)
    session.restart()
    seen.append(session.revision)
    assert seen == sorted(set(seen))


# -- browsing ---------------------------------------------------------------


def test_browsing_visits_each_model_once_then_wraps(session):
    session.add_assumption(parse_term("assign(alexander,(1,1))"), True)
    total = len(session._solve(MODELS_ALL).models)
    assert total > 1
    seen = [session.compute_snapshot().model]
    for _ in range(total - 1):
        session.next_solution()
        snap = session.compute_snapshot()
        assert snap.browsing
        seen.append(snap.model)
    assert len(set(seen)) == total  # each model exactly once
    session.next_solution()
    assert session.compute_snapshot().model == seen[0]  # wrapped around


def test_mutation_stops_browsing(session):
    session.next_solution()
    assert session.compute_snapshot().browsing
    session.add_assumption(parse_term("assign(alexander,(1,1))"), True)
    assert not session.compute_snapshot().browsing


def test_next_solution_on_unsat(session):
    session.add_assumption(parse_term("assign(alexander,(1,1))"), True)
    session.add_assumption(parse_term("assign(torsten,(1,2))"), True)
    with pytest.raises(NoSolution):
        session.next_solution()


# -- unsat retention --------------------------------------------------------


def test_unsat_retains_last_sat_content(session):
    session.add_assumption(parse_term("assign(alexander,(1,1))"), True)
    sat_snap = session.compute_snapshot()
    session.add_assumption(parse_term("assign(torsten,(1,2))"), True)
    unsat_snap = session.compute_snapshot()
    assert unsat_snap.status == "unsat"
    assert unsat_snap.model == sat_snap.model
    assert unsat_snap.cautious == sat_snap.cautious
    assert unsat_snap.brave == sat_snap.brave
    assert len(unsat_snap.assumptions) == 2
    assert "_clinguin_unsat." in snapshot_facts(unsat_snap)


# -- fact rendering ---------------------------------------------------------


def test_snapshot_facts_shape(session):
    session.add_assumption(parse_term("assign(alexander,(1,1))"), True)
    text = snapshot_facts(session.compute_snapshot())
    lines = text.strip().splitlines()
    assert all(line.endswith(".") for line in lines)
    assert "_clinguin_assume(assign(alexander,(1,1)),true)." in lines
    assert any(line.startswith("_all(") for line in lines)
    assert any(line.startswith("_any(") for line in lines)
    assert "_clinguin_unsat." not in lines


def test_snapshot_facts_mus_via_explanation_backend(bridge):
    session = make_session(
        bridge, "ExplanationBackend", {"assumption_signature": ["cons,2"]}
    )
    session.add_assumption(parse_term("assign(alexander,(1,1))"), True)
    session.add_assumption(parse_term("assign(torsten,(1,2))"), True)
    snap = session.compute_snapshot()
    assert snap.status == "unsat" and snap.mus
    text = snapshot_facts(snap)
    assert "_clinguin_mus(assign(alexander,(1,1)))." in text
    assert "#defined _clinguin_mus/1." in text


# -- export -----------------------------------------------------------------


def test_export_instance(session, tmp_path):
    session.add_atom(parse_term('person("ada",dog)'))
    session.add_assumption(parse_term("assign(alexander,(1,1))"), True)
    destination = tmp_path / "out.lp"
    text = session.export_instance(str(destination))
    assert destination.read_text() == text
    assert 'person("ada",dog).' in text
    assert "% assumption: assign(alexander,(1,1)) true" in text
