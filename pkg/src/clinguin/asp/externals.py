"""Registry of @-functions available to encodings during grounding."""

from __future__ import annotations

from ..terms import Constant, Number, QuotedString, Term, render_term


def unquoted(t: Term) -> str:
    """Bare text of a term: string content, digits, or constant name."""
    if isinstance(t, QuotedString):
        return t.text
    if isinstance(t, Number):
        return str(t.value)
    if isinstance(t, Constant):
        return t.name
    return render_term(t)


def concat(args: tuple[Term, ...]) -> QuotedString:
    """@concat: join the unquoted renderings of all arguments into a string."""
    if not args:
        raise ValueError("@concat needs at least one argument")
    return QuotedString("".join(unquoted(a) for a in args))


DEFAULT_EXTERNALS = {"concat": concat}
