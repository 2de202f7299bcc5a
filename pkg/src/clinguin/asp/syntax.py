"""Tokenizer, AST and parser for the supported logic-program subset.

Statements:

    head.                       facts and ground choices
    head :- lit, ..., lit.      normal and choice rules
    :- lit, ..., lit.           integrity constraints
    #external atom.             externally controlled ground atom
    #defined name/arity.        suppress undefined-predicate warnings

where ``head`` is an atom or ``{ atom : cond, ... ; ... }`` and a literal is
an atom, ``not`` atom, or a comparison between terms.  Terms extend the
ground syntax with variables (uppercase or ``_``) and ``@name(...)`` calls.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..terms import Constant, Function, Number, QuotedString, Signature, TupleTerm


class ProgramSyntaxError(ValueError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ExtCall:
    """An @function call, evaluated during grounding."""

    name: str
    args: tuple

    def __str__(self) -> str:
        return f"@{self.name}({','.join(map(str, self.args))})"


@dataclass(frozen=True)
class Comparison:
    op: str  # = != < <= > >=
    left: object
    right: object


@dataclass(frozen=True)
class Literal:
    atom: object  # a term
    positive: bool = True


@dataclass(frozen=True)
class ChoiceElement:
    atom: object
    condition: tuple = ()  # of Literal/Comparison


@dataclass
class Rule:
    head: object  # term | list[ChoiceElement] (choice) | None (constraint)
    body: list = field(default_factory=list)
    line: int = 0


@dataclass
class External:
    atom: object
    line: int = 0


@dataclass
class Defined:
    signature: Signature
    line: int = 0


@dataclass
class Program:
    statements: list = field(default_factory=list)

    @property
    def rules(self):
        return [s for s in self.statements if isinstance(s, Rule)]


# ---------------------------------------------------------------------------
# Tokenizer

_PUNCT = [":-", "!=", "<=", ">=", "..", "{", "}", "(", ")", ",", ";", ":", ".", "=", "<", ">", "/"]


@dataclass(frozen=True)
class Token:
    kind: str  # ident var num str punct at hash eof
    value: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)

    def error(msg):
        raise ProgramSyntaxError(line, col, msg)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "%":
            if text.startswith("%*", i):
                end = text.find("*%", i + 2)
                if end < 0:
                    error("unterminated block comment")
                skipped = text[i : end + 2]
                line += skipped.count("\n")
                col = 1 if "\n" in skipped else col + len(skipped)
                i = end + 2
                continue
            end = text.find("\n", i)
            i = n if end < 0 else end
            continue
        start_line, start_col = line, col
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 2 if text[j] == "\\" else 1
            if j >= n:
                error("unterminated string")
            tokens.append(Token("str", text[i : j + 1], start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("num", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "var" if word[0].isupper() else "ident"
            tokens.append(Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == "@":
            tokens.append(Token("at", "@", start_line, start_col))
            i += 1
            col += 1
            continue
        if ch == "#":
            j = i + 1
            while j < n and text[j].isalpha():
                j += 1
            tokens.append(Token("hash", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(Token("punct", p, start_line, start_col))
                i += len(p)
                col += len(p)
                break
        else:
            error(f"unexpected character {ch!r}")
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser

_COMPARISONS = {"=", "!=", "<", "<=", ">", ">="}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0
        self.anon = itertools.count()

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, msg: str):
        raise ProgramSyntaxError(self.tok.line, self.tok.col, msg)

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def accept(self, kind: str, value: str | None = None) -> Token | None:
        if self.tok.kind == kind and (value is None or self.tok.value == value):
            return self.advance()
        return None

    def expect(self, kind: str, value: str | None = None) -> Token:
        tok = self.accept(kind, value)
        if tok is None:
            want = value if value is not None else kind
            self.error(f"expected {want!r}, found {self.tok.value!r}")
        return tok

    # -- statements --------------------------------------------------------

    def parse_program(self) -> Program:
        prog = Program()
        while self.tok.kind != "eof":
            prog.statements.append(self.parse_statement())
        return prog

    def parse_statement(self):
        line = self.tok.line
        if self.tok.kind == "hash":
            return self.parse_directive()
        head = None
        if not (self.tok.kind == "punct" and self.tok.value == ":-"):
            if self.tok.kind == "punct" and self.tok.value == "{":
                head = self.parse_choice()
            else:
                head = self.parse_term()
        body = []
        if self.accept("punct", ":-"):
            body = self.parse_literals()
        self.expect("punct", ".")
        return Rule(head=head, body=body, line=line)

    def parse_directive(self):
        tok = self.expect("hash")
        if tok.value == "#external":
            atom = self.parse_term()
            self.expect("punct", ".")
            return External(atom=atom, line=tok.line)
        if tok.value == "#defined":
            name = self.expect("ident").value
            self.expect("punct", "/")
            arity = int(self.expect("num").value)
            self.expect("punct", ".")
            return Defined(signature=Signature(name, arity), line=tok.line)
        self.error(f"unsupported directive {tok.value!r}")

    def parse_choice(self) -> list[ChoiceElement]:
        self.expect("punct", "{")
        elements = []
        if not (self.tok.kind == "punct" and self.tok.value == "}"):
            while True:
                atom = self.parse_term()
                condition = ()
                if self.accept("punct", ":"):
                    condition = tuple(self.parse_literals(stop_at_semicolon=True))
                elements.append(ChoiceElement(atom=atom, condition=condition))
                if not self.accept("punct", ";"):
                    break
        self.expect("punct", "}")
        return elements

    def parse_literals(self, stop_at_semicolon: bool = False) -> list:
        literals = [self.parse_literal()]
        while True:
            if stop_at_semicolon and self.tok.kind == "punct" and self.tok.value in (";", "}"):
                break
            if not self.accept("punct", ","):
                break
            literals.append(self.parse_literal())
        return literals

    def parse_literal(self):
        if self.accept("ident", "not"):
            return Literal(atom=self.parse_term(), positive=False)
        term = self.parse_term()
        if self.tok.kind == "punct" and self.tok.value in _COMPARISONS:
            op = self.advance().value
            return Comparison(op=op, left=term, right=self.parse_term())
        return Literal(atom=term, positive=True)

    # -- terms -------------------------------------------------------------

    def parse_term(self):
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Number(int(tok.value))
        if tok.kind == "str":
            self.advance()
            return _unquote(tok.value)
        if tok.kind == "var":
            self.advance()
            return Var(tok.value)
        if tok.kind == "at":
            self.advance()
            name = self.expect("ident").value
            args = tuple(self.parse_arglist())
            return ExtCall(name=name, args=args)
        if tok.kind == "ident":
            self.advance()
            if tok.value == "_":
                return Var(f"_Anon{next(self.anon)}")
            if self.tok.kind == "punct" and self.tok.value == "(":
                args = self.parse_arglist()
                if not args:
                    self.error("empty argument list")
                return Function(tok.value, tuple(args))
            return Constant(tok.value)
        if tok.kind == "punct" and tok.value == "(":
            return self.parse_tuple()
        self.error(f"expected a term, found {tok.value or tok.kind!r}")

    def parse_arglist(self) -> list:
        self.expect("punct", "(")
        if self.accept("punct", ")"):
            return []
        args = [self.parse_term()]
        while self.accept("punct", ","):
            args.append(self.parse_term())
        self.expect("punct", ")")
        return args

    def parse_tuple(self):
        self.expect("punct", "(")
        if self.accept("punct", ")"):
            return TupleTerm(())
        args = [self.parse_term()]
        saw_comma = False
        while self.accept("punct", ","):
            saw_comma = True
            if self.tok.kind == "punct" and self.tok.value == ")":
                break
            args.append(self.parse_term())
        self.expect("punct", ")")
        if len(args) == 1 and not saw_comma:
            return args[0]
        return TupleTerm(tuple(args))


def _unquote(raw: str) -> QuotedString:
    body = raw[1:-1]
    out = []
    i = 0
    while i < len(body):
        if body[i] == "\\" and i + 1 < len(body):
            esc = body[i + 1]
            out.append({"n": "\n", "t": "\t"}.get(esc, esc))
            i += 2
        else:
            out.append(body[i])
            i += 1
    return QuotedString("".join(out))


def parse_program(text: str) -> Program:
    return _Parser(tokenize(text)).parse_program()
