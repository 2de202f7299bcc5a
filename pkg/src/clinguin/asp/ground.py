"""Bottom-up grounder for the supported program subset.

Computes an overapproximation of the derivable atoms by a fixpoint over the
positive bodies, then instantiates every rule against it.  Negative literals
over atoms outside the approximation are trivially true and dropped; rules
with unmatched positive literals are dropped entirely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..terms import Constant, Function, Number, QuotedString, TupleTerm, compare_terms, signature_of
from .externals import DEFAULT_EXTERNALS
from .syntax import ChoiceElement, Comparison, Defined, External, ExtCall, Literal, Program, Rule, Var


class GroundingError(ValueError):
    pass


@dataclass(frozen=True)
class GroundRule:
    """head: ground atom, tuple of choice atoms, or None for a constraint."""

    head: object
    pos: tuple
    neg: tuple
    is_choice: bool = False


@dataclass
class GroundProgram:
    rules: list = field(default_factory=list)
    atoms: list = field(default_factory=list)  # insertion-ordered possible atoms
    externals: set = field(default_factory=set)
    warnings: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# Substitution and matching


def substitute(term, subst: dict, functions: dict):
    if isinstance(term, Var):
        try:
            return subst[term.name]
        except KeyError:
            raise GroundingError(f"unsafe variable '{term.name}'") from None
    if isinstance(term, Function):
        return Function(term.name, tuple(substitute(a, subst, functions) for a in term.args))
    if isinstance(term, TupleTerm):
        return TupleTerm(tuple(substitute(a, subst, functions) for a in term.args))
    if isinstance(term, ExtCall):
        args = tuple(substitute(a, subst, functions) for a in term.args)
        fn = functions.get(term.name)
        if fn is None:
            raise GroundingError(f"undefined external function @{term.name}")
        return fn(args)
    return term


def unify(pattern, ground, subst: dict) -> dict | None:
    """Match a pattern term (may contain Vars) against a ground term."""
    if isinstance(pattern, Var):
        bound = subst.get(pattern.name)
        if bound is None:
            new = dict(subst)
            new[pattern.name] = ground
            return new
        return subst if compare_terms(bound, ground) == 0 else None
    if isinstance(pattern, (Number, Constant, QuotedString)):
        return subst if pattern == ground else None
    if isinstance(pattern, Function):
        if not isinstance(ground, Function) or pattern.name != ground.name:
            return None
        if len(pattern.args) != len(ground.args):
            return None
        for p, g in zip(pattern.args, ground.args):
            subst = unify(p, g, subst)
            if subst is None:
                return None
        return subst
    if isinstance(pattern, TupleTerm):
        if not isinstance(ground, TupleTerm) or len(pattern.args) != len(ground.args):
            return None
        for p, g in zip(pattern.args, ground.args):
            subst = unify(p, g, subst)
            if subst is None:
                return None
        return subst
    if isinstance(pattern, ExtCall):
        raise GroundingError(f"@{pattern.name} is not allowed in a matching position")
    return None


def term_vars(term, out: set):
    if isinstance(term, Var):
        out.add(term.name)
    elif isinstance(term, (Function, TupleTerm, ExtCall)):
        for a in term.args:
            term_vars(a, out)


def _eval_comparison(cmp: Comparison, subst: dict, functions: dict) -> bool:
    left = substitute(cmp.left, subst, functions)
    right = substitute(cmp.right, subst, functions)
    c = compare_terms(left, right)
    return {
        "=": c == 0,
        "!=": c != 0,
        "<": c < 0,
        "<=": c <= 0,
        ">": c > 0,
        ">=": c >= 0,
    }[cmp.op]


# ---------------------------------------------------------------------------
# Grounder


class _Grounder:
    def __init__(self, program: Program, functions: dict):
        self.program = program
        self.functions = functions
        self.possible: dict = {}  # rendered-key -> atom, insertion ordered
        self.by_signature: dict = {}
        self.externals: list = []
        self.defined: set = set()

    def add_possible(self, atom) -> bool:
        key = atom
        if key in self.possible:
            return False
        self.possible[key] = atom
        self.by_signature.setdefault(signature_of(atom), []).append(atom)
        return True

    def candidates(self, pattern):
        sig = signature_of(pattern)
        if sig is not None:
            return self.by_signature.get(sig, [])
        if isinstance(pattern, Var):
            return list(self.possible.values())
        # tuple/number/string-shaped atoms cannot match predicate atoms
        return []

    def match_positives(self, literals, subst):
        """Yield substitutions matching positive literals; comparisons are
        evaluated as soon as their variables are bound."""
        pending_cmp = [l for l in literals if isinstance(l, Comparison)]
        positives = [l for l in literals if isinstance(l, Literal) and l.positive]

        def ready(cmp, bound):
            vs: set = set()
            term_vars(cmp.left, vs)
            term_vars(cmp.right, vs)
            return vs <= bound

        def rec(i, subst, done_cmp):
            bound = set(subst)
            for k, cmp in enumerate(pending_cmp):
                if k not in done_cmp and ready(cmp, bound):
                    if not _eval_comparison(cmp, subst, self.functions):
                        return
                    done_cmp = done_cmp | {k}
            if i == len(positives):
                if len(done_cmp) != len(pending_cmp):
                    raise GroundingError("comparison over unbound variables")
                yield subst
                return
            pattern = positives[i].atom
            for atom in self.candidates(pattern):
                new = unify(pattern, atom, subst)
                if new is not None:
                    yield from rec(i + 1, new, done_cmp)

        yield from rec(0, subst, frozenset())

    def check_safety(self, rule: Rule):
        bound: set = set()
        for lit in rule.body:
            if isinstance(lit, Literal) and lit.positive:
                term_vars(lit.atom, bound)
        need: set = set()
        heads = rule.head if isinstance(rule.head, list) else ([rule.head] if rule.head is not None else [])
        for el in heads:
            if isinstance(el, ChoiceElement):
                cond_bound = set(bound)
                for lit in el.condition:
                    if isinstance(lit, Literal) and lit.positive:
                        term_vars(lit.atom, cond_bound)
                el_need: set = set()
                term_vars(el.atom, el_need)
                for lit in el.condition:
                    if isinstance(lit, Comparison):
                        term_vars(lit.left, el_need)
                        term_vars(lit.right, el_need)
                    elif not lit.positive:
                        term_vars(lit.atom, el_need)
                unsafe = el_need - cond_bound
                if unsafe:
                    raise GroundingError(
                        f"line {rule.line}: unsafe variable(s) {sorted(unsafe)} in choice element"
                    )
            else:
                term_vars(el, need)
        for lit in rule.body:
            if isinstance(lit, Comparison):
                term_vars(lit.left, need)
                term_vars(lit.right, need)
            elif not lit.positive:
                term_vars(lit.atom, need)
        unsafe = need - bound
        if unsafe:
            raise GroundingError(f"line {rule.line}: unsafe variable(s) {sorted(unsafe)}")

    def run(self) -> GroundProgram:
        for st in self.program.statements:
            if isinstance(st, External):
                vs: set = set()
                term_vars(st.atom, vs)
                if vs:
                    raise GroundingError(f"line {st.line}: #external atom must be ground")
                self.externals.append(st.atom)
                self.add_possible(st.atom)
            elif isinstance(st, Defined):
                self.defined.add(st.signature)
        rules = self.program.rules
        for rule in rules:
            self.check_safety(rule)

        # fixpoint over possible atoms
        changed = True
        while changed:
            changed = False
            for rule in rules:
                if rule.head is None:
                    continue
                for subst in self.match_positives(rule.body, {}):
                    for g in self.instantiate(rule, subst):
                        if g.head is None:
                            continue
                        heads = g.head if g.is_choice else (g.head,)
                        for atom in heads:
                            changed |= self.add_possible(atom)

        # final instantiation
        ground = GroundProgram()
        seen: set = set()
        for rule in rules:
            for subst in self.match_positives(rule.body, {}):
                inst = self.instantiate(rule, subst)
                for g in inst:
                    if g is not None and g not in seen:
                        seen.add(g)
                        ground.rules.append(g)
        ground.atoms = list(self.possible.values())
        ground.externals = set(self.externals)
        ground.warnings = self.collect_warnings()
        return ground

    def instantiate(self, rule: Rule, subst) -> list:
        body = self.ground_body(rule.body, subst)
        if body is None:
            return []
        pos, neg = body
        if rule.head is None:
            return [GroundRule(head=None, pos=pos, neg=neg)]
        if isinstance(rule.head, list):
            out = []
            for el in rule.head:
                for cond_subst in self.match_positives(list(el.condition), subst):
                    cond_body = self.ground_body(list(el.condition), cond_subst)
                    if cond_body is None:
                        continue
                    cpos, cneg = cond_body
                    atom = substitute(el.atom, cond_subst, self.functions)
                    out.append(
                        GroundRule(
                            head=(atom,),
                            pos=tuple(dict.fromkeys(pos + cpos)),
                            neg=tuple(dict.fromkeys(neg + cneg)),
                            is_choice=True,
                        )
                    )
            return out
        atom = substitute(rule.head, subst, self.functions)
        return [GroundRule(head=atom, pos=pos, neg=neg)]

    def ground_body(self, body, subst):
        """Ground literal lists; returns (pos, neg) or None if trivially false."""
        pos, neg = [], []
        for lit in body:
            if isinstance(lit, Comparison):
                continue  # already checked during matching
            atom = substitute(lit.atom, subst, self.functions)
            if lit.positive:
                pos.append(atom)
            elif atom in self.possible:
                neg.append(atom)
            # negative literal over an impossible atom: trivially true
        return tuple(dict.fromkeys(pos)), tuple(dict.fromkeys(neg))

    def collect_warnings(self) -> list:
        defined_sigs = set(self.defined)
        for rule in self.program.rules:
            heads = rule.head if isinstance(rule.head, list) else ([rule.head] if rule.head is not None else [])
            for el in heads:
                atom = el.atom if isinstance(el, ChoiceElement) else el
                sig = _pattern_signature(atom)
                if sig is not None:
                    defined_sigs.add(sig)
        for ext in self.externals:
            sig = signature_of(ext)
            if sig is not None:
                defined_sigs.add(sig)
        used = {}
        for rule in self.program.rules:
            lits = list(rule.body)
            heads = rule.head if isinstance(rule.head, list) else []
            for el in heads:
                if isinstance(el, ChoiceElement):
                    lits.extend(el.condition)
            for lit in lits:
                if isinstance(lit, Literal):
                    sig = _pattern_signature(lit.atom)
                    if sig is not None and sig not in used:
                        used[sig] = rule.line
        warnings = []
        for sig, line in used.items():
            if sig not in defined_sigs:
                warnings.append(f"line {line}: info: atom '{sig}' does not occur in any rule head")
        return warnings


def _pattern_signature(term):
    if isinstance(term, Function):
        return signature_of(Function(term.name, tuple(Constant("x") for _ in term.args)))
    if isinstance(term, Constant):
        return signature_of(term)
    return None


def ground_program(program: Program, functions: dict | None = None) -> GroundProgram:
    fns = dict(DEFAULT_EXTERNALS)
    if functions:
        fns.update(functions)
    return _Grounder(program, fns).run()
