"""Pluggable backends and the explanation machinery.

The default backend solves as-is.  The explanation backend rewrites facts
matching configured predicate signatures into choices, assumes every
collected atom true (keeping the original program's models intact), and on
unsatisfiability shrinks the active assumptions to a minimal unsatisfiable
set published as ``_clinguin_mus/1`` facts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .asp.syntax import ProgramSyntaxError, Rule, parse_program
from .terms import Signature, match_signature, render_term, term_sort_key

SAT, UNSAT = "sat", "unsat"

MUS_PREDICATE = "_clinguin_mus"
DEFINED_MUS = f"#defined {MUS_PREDICATE}/1.\n"


class TransformError(ValueError):
    pass


class InvalidSignature(ValueError):
    pass


class NotUnsat(ValueError):
    """compute_mus was called on a satisfiable candidate set."""


def parse_assumption_signature(text: str) -> Signature:
    """Parse a ``name,arity`` option value into a Signature."""
    parts = text.split(",")
    if len(parts) != 2:
        raise InvalidSignature(f"expected 'name,arity', got {text!r}")
    name, arity_text = parts[0].strip(), parts[1].strip()
    try:
        arity = int(arity_text)
    except ValueError:
        raise InvalidSignature(f"arity is not an integer in {text!r}") from None
    try:
        return Signature(name, arity)
    except ValueError as exc:
        raise InvalidSignature(str(exc)) from None


# ---------------------------------------------------------------------------
# Fact-to-choice transformation


def _split_statements(source: str):
    """Split ASP source into (trivia, statement) chunks, preserving bytes.

    ``trivia`` is whitespace/comments before the statement; the statement
    text includes its terminating period.  The final chunk may have an
    empty statement (trailing trivia).
    """
    chunks = []
    i, n = 0, len(source)
    start = i
    stmt_start = None
    while i < n:
        ch = source[i]
        if stmt_start is None:
            if ch.isspace():
                i += 1
                continue
            if ch == "%":
                if source.startswith("%*", i):
                    end = source.find("*%", i + 2)
                    if end < 0:
                        raise TransformError("unterminated block comment")
                    i = end + 2
                else:
                    end = source.find("\n", i)
                    i = n if end < 0 else end + 1
                continue
            stmt_start = i
            continue
        if ch == '"':
            j = i + 1
            while j < n and source[j] != '"':
                j += 2 if source[j] == "\\" else 1
            if j >= n:
                raise TransformError("unterminated string")
            i = j + 1
            continue
        if ch == "%" and not source.startswith("%*", i):
            end = source.find("\n", i)
            i = n if end < 0 else end + 1
            continue
        if ch == ".":
            chunks.append((source[start:stmt_start], source[stmt_start : i + 1]))
            start = i + 1
            stmt_start = None
        i += 1
    if stmt_start is not None:
        raise TransformError("statement without terminating period")
    chunks.append((source[start:], ""))
    return chunks


def _as_ground_fact(statement: str):
    """The head atom if the statement is a ground, unconditional fact."""
    try:
        program = parse_program(statement)
    except ProgramSyntaxError:
        return None
    if len(program.statements) != 1:
        return None
    st = program.statements[0]
    if not isinstance(st, Rule) or st.body or st.head is None or isinstance(st.head, list):
        return None
    head = st.head
    try:
        render_term(head)  # raises on non-ground contents (Var/ExtCall)
    except TypeError:
        return None
    return head


def transform_facts_to_choices(source: str, sigs) -> tuple[str, set]:
    """Rewrite matching facts ``p(t).`` into choices ``{p(t)}.``.

    Returns the transformed text and the set of collected atoms.  All
    non-matching statements, comments and whitespace pass through
    byte-identical.
    """
    sigs = list(sigs)
    out = []
    collected: set = set()
    for trivia, statement in _split_statements(source):
        out.append(trivia)
        if not statement:
            continue
        head = _as_ground_fact(statement)
        if head is not None and any(match_signature(head, s) for s in sigs):
            out.append("{" + statement[:-1].strip() + "}.")
            collected.add(head)
        else:
            out.append(statement)
    return "".join(out), collected


# ---------------------------------------------------------------------------
# Minimal unsatisfiable subsets


@dataclass(frozen=True)
class MusResult:
    core: frozenset
    minimal: bool = True


def _candidate_key(item):
    if isinstance(item, tuple):
        atom, truth = item
        return (term_sort_key(atom), truth)
    return term_sort_key(item)


def compute_mus(candidates, probe) -> MusResult:
    """Deletion-based shrink of an unsatisfiable assumption set.

    ``probe`` maps a frozenset of candidates to "sat"/"unsat".  Candidates
    are processed in term order so the result is reproducible when several
    minimal sets exist.
    """
    ordered = sorted(candidates, key=_candidate_key)
    if probe(frozenset(ordered)) != UNSAT:
        raise NotUnsat("candidate set is satisfiable")
    core = list(ordered)
    for item in list(core):
        trial = [c for c in core if c != item]
        if probe(frozenset(trial)) == UNSAT:
            core = trial
    return MusResult(core=frozenset(core))


# ---------------------------------------------------------------------------
# Backends


class ClingoBackend:
    """Default backend: plain solving, user assumptions only."""

    name = "ClingoBackend"

    @classmethod
    def register_options(cls, parser):
        pass

    def configure(self, options: dict):
        pass

    def load_file(self, path: str) -> str:
        with open(path, encoding="utf-8") as fh:
            return fh.read()

    def on_ground(self, session):
        pass

    def assumption_list(self, user_assumptions: list) -> list:
        return list(user_assumptions)

    def snapshot_constructors(self) -> list:
        return []


class ExplanationBackend(ClingoBackend):
    """Adds signature-derived assumptions and MUS facts to snapshots."""

    name = "ExplanationBackend"

    def __init__(self):
        self.signatures: list = []
        self.collected: set = set()

    @classmethod
    def register_options(cls, parser):
        parser.add_argument(
            "--assumption-signature",
            action="append",
            default=[],
            metavar="NAME,ARITY",
            help="treat facts with this predicate signature as assumptions (repeatable)",
        )

    def configure(self, options: dict):
        for text in options.get("assumption_signature", []) or []:
            self.signatures.append(parse_assumption_signature(text))

    def load_file(self, path: str) -> str:
        source = super().load_file(path)
        if not self.signatures:
            return source
        transformed, atoms = transform_facts_to_choices(source, self.signatures)
        self.collected |= atoms
        return transformed

    def assumption_list(self, user_assumptions: list) -> list:
        extra = [
            (atom, True)
            for atom in sorted(self.collected, key=term_sort_key)
            if all(atom != a for a, _ in user_assumptions)
        ]
        return list(user_assumptions) + extra

    def snapshot_constructors(self) -> list:
        return [explanation_snapshot_constructor]


def explanation_snapshot_constructor(snapshot, session) -> str:
    """On unsat, publish one minimal unsatisfiable assumption set.

    On sat, only declare the predicate so UI encodings referring to it do
    not trigger undefined-atom warnings.
    """
    if snapshot.status != "unsat":
        return DEFINED_MUS
    candidates = frozenset(session.active_assumptions())
    result = compute_mus(candidates, session.probe_assumptions)
    core_atoms = tuple(sorted((atom for atom, _ in result.core), key=term_sort_key))
    snapshot.mus = snapshot.mus + (core_atoms,)
    facts = "".join(f"{MUS_PREDICATE}({render_term(a)}).\n" for a in core_atoms)
    return DEFINED_MUS + facts


BACKENDS = {cls.name: cls for cls in (ClingoBackend, ExplanationBackend)}


def get_backend(name: str):
    try:
        return BACKENDS[name]()
    except KeyError:
        known = ", ".join(sorted(BACKENDS))
        raise ValueError(f"unknown backend {name!r}; registered backends: {known}") from None
