"""Ground symbolic terms: the value currency shared by every layer.

Atoms, element ids, attribute values and operation arguments are all plain
ground terms in standard ASP syntax.  This module parses, renders, orders
and signature-matches them.  No variables, no rules: anything non-ground is
program text and belongs to the solver side.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Union


class TermSyntaxError(ValueError):
    """Malformed term text; carries the offset and what was expected there."""

    def __init__(self, position: int, expected: str):
        super().__init__(f"at position {position}: expected {expected}")
        self.position = position
        self.expected = expected


@total_ordering
class _TermBase:
    __slots__ = ()

    def __str__(self) -> str:
        return render_term(self)

    def __lt__(self, other) -> bool:
        return compare_terms(self, other) < 0


@dataclass(frozen=True, order=False)
class Number(_TermBase):
    value: int


@dataclass(frozen=True, order=False)
class Constant(_TermBase):
    name: str


@dataclass(frozen=True, order=False)
class QuotedString(_TermBase):
    text: str


@dataclass(frozen=True, order=False)
class Function(_TermBase):
    name: str
    args: tuple

    def __post_init__(self):
        if not self.args:
            raise ValueError("zero-arity function; use Constant instead")
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True, order=False)
class TupleTerm(_TermBase):
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


Term = Union[Number, Constant, QuotedString, Function, TupleTerm]


@dataclass(frozen=True)
class Signature:
    """A (name, arity) pair identifying a family of atoms, e.g. cons/2."""

    name: str
    arity: int

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError(f"negative arity: {self.arity}")
        if not _is_identifier(self.name):
            raise ValueError(f"not a constant identifier: {self.name!r}")

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


# Leading underscore is allowed: the reified predicates (_all, _any,
# _clinguin_*) and the _value placeholder rely on it.
def _is_identifier(name: str) -> bool:
    return (
        bool(name)
        and (name[0].islower() or name[0] == "_")
        and all(c.isalnum() or c == "_" for c in name)
    )


# ---------------------------------------------------------------------------
# Parsing


class _Cursor:
    __slots__ = ("text", "pos")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise TermSyntaxError(self.pos, f"'{ch}'")
        self.pos += 1


def parse_term(text: str) -> Term:
    """Parse a complete ground term; surrounding whitespace is allowed."""
    cur = _Cursor(text)
    cur.skip_ws()
    term = _parse(cur)
    cur.skip_ws()
    if cur.pos != len(cur.text):
        raise TermSyntaxError(cur.pos, "end of input")
    return term


def _parse(cur: _Cursor) -> Term:
    cur.skip_ws()
    ch = cur.peek()
    if ch == "":
        raise TermSyntaxError(cur.pos, "a term")
    if ch == "-" or ch.isdigit():
        return _parse_number(cur)
    if ch == '"':
        return _parse_string(cur)
    if ch == "(":
        return _parse_parenthesized(cur)
    if ch.islower() or ch == "_":
        return _parse_symbolic(cur)
    raise TermSyntaxError(cur.pos, "a number, constant, string or '('")


def _parse_number(cur: _Cursor) -> Number:
    start = cur.pos
    if cur.peek() == "-":
        cur.pos += 1
    if not cur.peek().isdigit():
        raise TermSyntaxError(cur.pos, "a digit")
    while cur.peek().isdigit():
        cur.pos += 1
    return Number(int(cur.text[start : cur.pos]))


_ESCAPES = {'"': '"', "\\": "\\", "n": "\n"}


def _parse_string(cur: _Cursor) -> QuotedString:
    cur.expect('"')
    out = []
    while True:
        ch = cur.peek()
        if ch == "":
            raise TermSyntaxError(cur.pos, "closing '\"'")
        cur.pos += 1
        if ch == '"':
            return QuotedString("".join(out))
        if ch == "\\":
            esc = cur.peek()
            if esc not in _ESCAPES:
                raise TermSyntaxError(cur.pos, "an escape among \\\" \\\\ \\n")
            cur.pos += 1
            out.append(_ESCAPES[esc])
        else:
            out.append(ch)


def _parse_symbolic(cur: _Cursor) -> Term:
    start = cur.pos
    while cur.peek().isalnum() or cur.peek() == "_":
        cur.pos += 1
    name = cur.text[start : cur.pos]
    cur.skip_ws()
    if cur.peek() != "(":
        return Constant(name)
    args = _parse_arglist(cur)
    if not args:
        raise TermSyntaxError(cur.pos, "at least one argument")
    return Function(name, tuple(args))


def _parse_parenthesized(cur: _Cursor) -> Term:
    # "(t)" is just t parenthesized; "(t,)" is a one-tuple; "()" the empty one.
    cur.expect("(")
    cur.skip_ws()
    if cur.peek() == ")":
        cur.pos += 1
        return TupleTerm(())
    args = [_parse(cur)]
    saw_comma = False
    while True:
        cur.skip_ws()
        if cur.peek() == ",":
            saw_comma = True
            cur.pos += 1
            cur.skip_ws()
            if cur.peek() == ")":
                break
            args.append(_parse(cur))
        else:
            break
    cur.skip_ws()
    cur.expect(")")
    if len(args) == 1 and not saw_comma:
        return args[0]
    return TupleTerm(tuple(args))


def _parse_arglist(cur: _Cursor) -> list:
    cur.expect("(")
    cur.skip_ws()
    if cur.peek() == ")":
        cur.pos += 1
        return []
    args = [_parse(cur)]
    while True:
        cur.skip_ws()
        if cur.peek() == ",":
            cur.pos += 1
            args.append(_parse(cur))
        else:
            break
    cur.skip_ws()
    cur.expect(")")
    return args


# ---------------------------------------------------------------------------
# Rendering


def render_term(t: Term) -> str:
    """Canonical, whitespace-free rendering; parse_term(render_term(t)) == t."""
    if isinstance(t, Number):
        return str(t.value)
    if isinstance(t, Constant):
        return t.name
    if isinstance(t, QuotedString):
        body = t.text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{body}"'
    if isinstance(t, Function):
        return f"{t.name}({','.join(render_term(a) for a in t.args)})"
    if isinstance(t, TupleTerm):
        if len(t.args) == 1:
            return f"({render_term(t.args[0])},)"
        return f"({','.join(render_term(a) for a in t.args)})"
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Ordering and signatures

_KIND_NUMBER, _KIND_CONSTANT, _KIND_STRING, _KIND_COMPOUND = range(4)


def term_sort_key(t: Term):
    """Total-order sort key: Number < Constant < QuotedString < compound."""
    if isinstance(t, Number):
        return (_KIND_NUMBER, t.value)
    if isinstance(t, Constant):
        return (_KIND_CONSTANT, t.name)
    if isinstance(t, QuotedString):
        return (_KIND_STRING, t.text)
    if isinstance(t, Function):
        name, args = t.name, t.args
    else:
        name, args = "", t.args
    return (_KIND_COMPOUND, name, len(args), tuple(term_sort_key(a) for a in args))


def compare_terms(a: Term, b: Term) -> int:
    ka, kb = term_sort_key(a), term_sort_key(b)
    return -1 if ka < kb else (1 if ka > kb else 0)


def signature_of(t: Term) -> Signature | None:
    """The predicate signature of an atom-shaped term, if it has one."""
    if isinstance(t, Constant):
        return Signature(t.name, 0)
    if isinstance(t, Function):
        return Signature(t.name, len(t.args))
    return None


def match_signature(t: Term, sig: Signature) -> bool:
    if isinstance(t, Function):
        return t.name == sig.name and len(t.args) == sig.arity
    if isinstance(t, Constant):
        return t.name == sig.name and sig.arity == 0
    return False
