"""Stable model search over ground programs.

Choice rules are compiled away with one auxiliary atom per element
(``{a} :- B`` becomes ``a :- B, not a'`` and ``a' :- B, not a``), leaving a
normal program.  The search assigns atoms with forward propagation
(satisfied bodies fire heads, unsupported atoms go false) and verifies each
total assignment against the least model of its reduct, which also rules
out unfounded loops.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from ..terms import term_sort_key
from .ground import GroundProgram

UNDEF, TRUE, FALSE = 0, 1, 2


@dataclass
class _Compiled:
    n_atoms: int
    n_real: int  # atom ids < n_real are real atoms; the rest are choice auxiliaries
    rules: list  # (head id | -1 for constraints, pos tuple, neg tuple)
    atoms: list  # real atom terms by id


def compile_program(ground: GroundProgram) -> _Compiled:
    ids: dict = {}
    atoms: list = []

    def intern(atom) -> int:
        i = ids.get(atom)
        if i is None:
            i = len(atoms)
            ids[atom] = i
            atoms.append(atom)
        return i

    for atom in ground.atoms:
        intern(atom)
    n_real = len(atoms)
    rules = []
    n_aux = 0
    for g in ground.rules:
        if g.is_choice:
            for atom in g.head:
                a = intern(atom)
                aux = n_real + n_aux  # allocated after all real atoms
                n_aux += 1
                pos = tuple(intern(x) for x in g.pos)
                neg = tuple(intern(x) for x in g.neg)
                rules.append((a, pos, neg + (aux,)))
                rules.append((aux, pos, neg + (a,)))
        else:
            head = -1 if g.head is None else intern(g.head)
            if g.head is not None and len(atoms) > n_real:
                raise AssertionError("real atom interned after aux allocation")
            rules.append((head, tuple(intern(x) for x in g.pos), tuple(intern(x) for x in g.neg)))
    if len(atoms) != n_real:
        raise AssertionError("ground.atoms did not cover every head atom")
    return _Compiled(n_atoms=n_real + n_aux, n_real=n_real, rules=rules, atoms=atoms)


class _Search:
    def __init__(self, comp: _Compiled):
        self.comp = comp
        n = comp.n_atoms
        self.pos_watch = [[] for _ in range(n)]
        self.neg_watch = [[] for _ in range(n)]
        self.head_rules = [[] for _ in range(n)]
        for ri, (head, pos, neg) in enumerate(comp.rules):
            for a in pos:
                self.pos_watch[a].append(ri)
            for a in neg:
                self.neg_watch[a].append(ri)
            if head >= 0:
                self.head_rules[head].append(ri)

    def models(self) -> Iterator[frozenset]:
        comp = self.comp
        n = comp.n_atoms
        assign = [UNDEF] * n
        remaining = [len(r[1]) + len(r[2]) for r in comp.rules]
        falsified = [False] * len(comp.rules)
        supports = [len(self.head_rules[a]) for a in range(n)]

        def propagate(state, scan_units=False) -> bool:
            assign, remaining, falsified, supports, queue = state

            def set_atom(a, value) -> bool:
                if assign[a] != UNDEF:
                    return assign[a] == value
                assign[a] = value
                queue.append(a)
                return True

            def enforce(ri) -> bool:
                # the body's single open literal must not become satisfied
                _, pos, neg = comp.rules[ri]
                for x in pos:
                    if assign[x] != TRUE:
                        return set_atom(x, FALSE)
                for x in neg:
                    if assign[x] != FALSE:
                        return set_atom(x, TRUE)
                return False  # body satisfied with a false head

            def require_support(a) -> bool:
                # a is true with one support left: that body must hold
                for ri in self.head_rules[a]:
                    if not falsified[ri]:
                        _, pos, neg = comp.rules[ri]
                        return all(set_atom(x, TRUE) for x in pos) and all(
                            set_atom(x, FALSE) for x in neg
                        )
                return False

            while True:
                while queue:
                    a = queue.pop()
                    val = assign[a]
                    sat_rules = self.pos_watch[a] if val == TRUE else self.neg_watch[a]
                    fal_rules = self.neg_watch[a] if val == TRUE else self.pos_watch[a]
                    for ri in sat_rules:
                        remaining[ri] -= 1
                        if falsified[ri]:
                            continue
                        head = comp.rules[ri][0]
                        if remaining[ri] == 0:
                            if head < 0:
                                return False  # violated constraint
                            if not set_atom(head, TRUE):
                                return False
                        elif remaining[ri] == 1 and (head < 0 or assign[head] == FALSE):
                            if not enforce(ri):
                                return False
                    for ri in fal_rules:
                        if not falsified[ri]:
                            falsified[ri] = True
                            head = comp.rules[ri][0]
                            if head >= 0:
                                supports[head] -= 1
                                if supports[head] == 0:
                                    if assign[head] == TRUE:
                                        return False
                                    if not set_atom(head, FALSE):
                                        return False
                                elif supports[head] == 1 and assign[head] == TRUE:
                                    if not require_support(head):
                                        return False
                    if val == TRUE:
                        if supports[a] == 1 and not require_support(a):
                            return False
                    else:
                        for ri in self.head_rules[a]:
                            if not falsified[ri] and remaining[ri] == 1 and not enforce(ri):
                                return False
                if not scan_units:
                    return True
                scan_units = False
                for ri, (head, _, _) in enumerate(comp.rules):
                    if (
                        remaining[ri] == 1
                        and not falsified[ri]
                        and (head < 0 or assign[head] == FALSE)
                        and not enforce(ri)
                    ):
                        return False

        def search(state):
            assign = state[0]
            try:
                branch = assign.index(UNDEF)
            except ValueError:
                if self.stable(assign):
                    yield frozenset(
                        comp.atoms[i] for i in range(comp.n_real) if assign[i] == TRUE
                    )
                return
            for value in (TRUE, FALSE):
                new_state = (
                    assign.copy(),
                    state[1].copy(),
                    state[2].copy(),
                    state[3].copy(),
                    [],
                )
                new_state[0][branch] = value
                new_state[4].append(branch)
                if propagate(new_state):
                    yield from search(new_state)

        # initial propagation: facts and unsupported atoms
        queue = []
        for ri, (head, pos, neg) in enumerate(comp.rules):
            if remaining[ri] == 0 and head >= 0 and assign[head] == UNDEF:
                assign[head] = TRUE
                queue.append(head)
        for a in range(n):
            if supports[a] == 0 and assign[a] == UNDEF:
                assign[a] = FALSE
                queue.append(a)
            elif supports[a] == 0 and assign[a] == TRUE:
                return
        state = (assign, remaining, falsified, supports, queue)
        if propagate(state, scan_units=True):
            yield from search(state)

    def stable(self, assign) -> bool:
        """Total assignment check: least model of the reduct equals it."""
        comp = self.comp
        true_set = {i for i, v in enumerate(assign) if v == TRUE}
        derived: set = set()
        changed = True
        applicable = [
            (head, pos)
            for head, pos, neg in comp.rules
            if head >= 0 and not any(a in true_set for a in neg)
        ]
        for head, pos, neg in comp.rules:
            if head < 0 and all(a in true_set for a in pos) and not any(a in true_set for a in neg):
                return False
        while changed:
            changed = False
            for head, pos in applicable:
                if head not in derived and all(a in derived for a in pos):
                    derived.add(head)
                    changed = True
        return derived == true_set


def enumerate_models(ground: GroundProgram, limit: int = 0) -> tuple[list, bool]:
    """Up to ``limit`` stable models (0 = all) as sorted atom tuples.

    Returns (models, exhausted)."""
    comp = compile_program(ground)
    out = []
    exhausted = True
    for model in _Search(comp).models():
        out.append(tuple(sorted(model, key=term_sort_key)))
        if limit and len(out) >= limit:
            exhausted = False
            break
    return out, exhausted


def consequences(ground: GroundProgram, mode: str) -> tuple | None:
    """Cautious (intersection) or brave (union) atoms, or None if unsat."""
    models, _ = enumerate_models(ground, 0)
    if not models:
        return None
    sets = [set(m) for m in models]
    if mode == "cautious":
        result = set.intersection(*sets)
    elif mode == "brave":
        result = set.union(*sets)
    else:
        raise ValueError(f"unknown consequence mode {mode!r}")
    return tuple(sorted(result, key=term_sort_key))
