"""The mutable domain session and its reified snapshots.

One session owns the domain files, user assumptions, externals, added atoms
and the browsing cursor.  Every state change bumps a revision counter;
snapshots are computed lazily per revision and rendered into the fact
format consumed by the UI encoding (``_all/1``, ``_any/1``,
``_clinguin_assume/2``, ``_clinguin_browsing``, ``_clinguin_mus/1``).
"""

from __future__ import annotations

from dataclasses import dataclass

from .asp.syntax import External, parse_program
from .backends import SAT, UNSAT
from .solver import (
    BRAVE,
    CAUTIOUS,
    MODELS_ONE,
    ProgramBundle,
    SolveMode,
    SolveRequest,
    SolverBridge,
)
from .terms import Term, render_term, term_sort_key


class DomainError(Exception):
    pass


class InvalidConfig(DomainError):
    pass


class ConflictingTruth(DomainError):
    pass


class UnknownExternal(DomainError):
    pass


class NoSolution(DomainError):
    pass


EXTERNAL_TRUE, EXTERNAL_FALSE, EXTERNAL_RELEASE = "true", "false", "release"


@dataclass
class DomainStateSnapshot:
    """One consistent view of the domain, immutable once published."""

    status: str  # sat | unsat
    model: tuple = ()
    cautious: tuple = ()
    brave: tuple = ()
    assumptions: tuple = ()  # of (Term, bool), sorted
    browsing: bool = False
    mus: tuple = ()  # of tuples of assumption atoms; only the first is emitted
    extra_facts: str = ""


def snapshot_facts(snapshot: DomainStateSnapshot) -> str:
    """Render a snapshot as the fact program fed into the UI encoding."""
    lines = []
    for atom in snapshot.model:
        lines.append(f"{render_term(atom)}.")
    for atom in snapshot.cautious:
        lines.append(f"_all({render_term(atom)}).")
    for atom in snapshot.brave:
        lines.append(f"_any({render_term(atom)}).")
    for atom, truth in snapshot.assumptions:
        lines.append(f"_clinguin_assume({render_term(atom)},{'true' if truth else 'false'}).")
    if snapshot.browsing:
        lines.append("_clinguin_browsing.")
    if snapshot.status == UNSAT:
        lines.append("_clinguin_unsat.")
    text = "\n".join(lines)
    if snapshot.extra_facts:
        text += ("\n" if text else "") + snapshot.extra_facts.rstrip("\n")
    return text + "\n" if text else ""


class DomainSession:
    """Single-writer session; callers serialize mutating operations."""

    def __init__(self, domain_files, backend, bridge: SolverBridge | None = None,
                 options: dict | None = None):
        if not domain_files:
            raise InvalidConfig("at least one domain file is required")
        self.backend = backend
        self.bridge = bridge or SolverBridge()
        self.backend.configure(options or {})
        parts = []
        for path in domain_files:
            try:
                parts.append((str(path), self.backend.load_file(path)))
            except FileNotFoundError:
                raise InvalidConfig(f"domain file not found: {path}") from None
        self.domain_bundle = ProgramBundle(parts)
        self.declared_externals = self._collect_externals()
        self.backend.on_ground(self)
        self._reset_state()
        self.revision = 0
        self._cache: tuple | None = None
        # fail fast on unreadable programs; also warms the snapshot cache
        self.compute_snapshot()

    def _reset_state(self):
        self.assumptions: dict = {}
        self.externals: dict = {}
        self.added_atoms: set = set()
        self.browsing = False
        self.browse_cursor = 0
        self.last_sat_snapshot: DomainStateSnapshot | None = None

    def _collect_externals(self) -> set:
        declared: set = set()
        for _, text in self.domain_bundle.parts:
            try:
                program = parse_program(text)
            except ValueError:
                continue  # surfaced later through the solver with origin labels
            for st in program.statements:
                if isinstance(st, External):
                    declared.add(st.atom)
        return declared

    # -- mutations ---------------------------------------------------------

    def _mutated(self):
        self.browsing = False
        self.browse_cursor = 0
        self.revision += 1

    def add_assumption(self, atom: Term, truth: bool):
        if self.assumptions.get(atom, truth) != truth:
            raise ConflictingTruth(
                f"{render_term(atom)} is already assumed {str(self.assumptions[atom]).lower()}"
            )
        self.assumptions[atom] = truth
        self._mutated()

    def remove_assumption(self, atom: Term):
        self.assumptions.pop(atom, None)
        self._mutated()

    def clear_assumptions(self):
        self.assumptions.clear()
        self._mutated()

    def set_external(self, atom: Term, value: str):
        if value not in (EXTERNAL_TRUE, EXTERNAL_FALSE, EXTERNAL_RELEASE):
            raise DomainError(f"invalid external value {value!r}")
        if atom not in self.declared_externals:
            raise UnknownExternal(f"{render_term(atom)} is not declared #external")
        self.externals[atom] = value
        self._mutated()

    def add_atom(self, atom: Term):
        self.added_atoms.add(atom)
        self._mutated()

    def remove_atom(self, atom: Term):
        self.added_atoms.discard(atom)
        self._mutated()

    def restart(self):
        self._reset_state()
        self.revision += 1

    def next_solution(self):
        current = self.compute_snapshot()
        if current.status == UNSAT:
            raise NoSolution("no stable model under the current assumptions")
        cursor = self.browse_cursor + 1 if self.browsing else 1
        models = self._solve(SolveMode("models", cursor + 1)).models
        if len(models) <= cursor:
            cursor = 0  # past the last model: wrap around to the first
        self.browsing = True
        self.browse_cursor = cursor
        self.revision += 1

    # -- solving -----------------------------------------------------------

    def _program(self) -> ProgramBundle:
        bundle = self.domain_bundle
        if self.added_atoms:
            facts = "".join(
                f"{render_term(a)}.\n" for a in sorted(self.added_atoms, key=term_sort_key)
            )
            bundle = bundle.extended("<added-atoms>", facts)
        forced = [a for a, v in self.externals.items() if v == EXTERNAL_TRUE]
        if forced:
            facts = "".join(f"{render_term(a)}.\n" for a in sorted(forced, key=term_sort_key))
            bundle = bundle.extended("<externals>", facts)
        return bundle

    def active_assumptions(self) -> list:
        """User assumptions plus backend-injected ones, as (atom, truth) pairs."""
        user = sorted(self.assumptions.items(), key=lambda kv: term_sort_key(kv[0]))
        return self.backend.assumption_list(user)

    def _solve(self, mode: SolveMode, assumptions=None):
        req = SolveRequest(
            program=self._program(),
            assumptions=list(self.active_assumptions() if assumptions is None else assumptions),
            mode=mode,
        )
        return self.bridge.solve(req)

    def probe_assumptions(self, pairs) -> str:
        """Satisfiability of the session program under exactly these pairs."""
        outcome = self._solve(MODELS_ONE, assumptions=sorted(pairs, key=_pair_key))
        return SAT if outcome.status == "sat" else UNSAT

    def compute_snapshot(self) -> DomainStateSnapshot:
        if self._cache is not None and self._cache[0] == self.revision:
            return self._cache[1]
        focused = self._solve(
            SolveMode("models", self.browse_cursor + 1 if self.browsing else 1)
        )
        user = tuple(sorted(self.assumptions.items(), key=lambda kv: term_sort_key(kv[0])))
        if focused.status == "unsat":
            previous = self.last_sat_snapshot
            snapshot = DomainStateSnapshot(
                status=UNSAT,
                model=previous.model if previous else (),
                cautious=previous.cautious if previous else (),
                brave=previous.brave if previous else (),
                assumptions=user,
                browsing=self.browsing,
            )
        else:
            model = focused.models[-1]
            cautious = self._solve(CAUTIOUS).models[0]
            brave = self._solve(BRAVE).models[0]
            snapshot = DomainStateSnapshot(
                status=SAT,
                model=tuple(sorted(model, key=term_sort_key)),
                cautious=tuple(sorted(cautious, key=term_sort_key)),
                brave=tuple(sorted(brave, key=term_sort_key)),
                assumptions=user,
                browsing=self.browsing,
            )
        extra = [snapshot.extra_facts] if snapshot.extra_facts else []
        for constructor in self.backend.snapshot_constructors():
            extra.append(constructor(snapshot, self))
        snapshot.extra_facts = "".join(extra)
        if snapshot.status == SAT:
            self.last_sat_snapshot = snapshot
        self._cache = (self.revision, snapshot)
        return snapshot

    def export_instance(self, destination=None) -> str:
        """Added atoms as facts plus the assumptions as comment lines."""
        lines = [
            f"{render_term(a)}." for a in sorted(self.added_atoms, key=term_sort_key)
        ]
        lines += [
            f"% assumption: {render_term(a)} {'true' if t in (True,) else 'false'}"
            for a, t in sorted(self.assumptions.items(), key=lambda kv: term_sort_key(kv[0]))
        ]
        text = "\n".join(lines) + ("\n" if lines else "")
        if destination is not None:
            try:
                with open(destination, "w", encoding="utf-8") as fh:
                    fh.write(text)
            except OSError as exc:
                raise DomainError(f"cannot write {destination}: {exc}") from exc
        return text


def _pair_key(pair):
    atom, truth = pair
    return (term_sort_key(atom), truth)
