"""Expression evaluator for assignment application chains.

Grammar::

    expr  := NAME group*
    group := "(" items ")"
    items := atom | "{" atom ("," atom)* "}"
    atom  := identifier

The head names either a profile functional (each group then narrows the
user set) or a generalized value (each group is an assignment point
set applied left to right).  Any grammar-conformant input either
evaluates or raises one of the declared errors.
"""

from __future__ import annotations

import json
import re

from .calculus import GeneralizedValue, Value, apply_assignment
from .engine import PortalEngine
from .errors import ParseError, UnknownName

_TOKEN = re.compile(r"\s*([(){},]|[A-Za-z_][A-Za-z0-9_.-]*)")


def tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r} at offset {pos}")
        tokens.append(match.group(1))
        pos = match.end()
    return tokens


def parse(text: str) -> tuple[str, list[list[str]]]:
    """Parse an expression into its head name and assignment groups."""
    tokens = tokenize(text)
    if not tokens or tokens[0] in "(){},":
        raise ParseError("expression must start with a name")
    head = tokens[0]
    groups: list[list[str]] = []
    i = 1
    while i < len(tokens):
        if tokens[i] != "(":
            raise ParseError(f"expected '(' at token {i}, got {tokens[i]!r}")
        i += 1
        items: list[str] = []
        if i < len(tokens) and tokens[i] == "{":
            i += 1
            expect_atom = True
            while i < len(tokens) and tokens[i] != "}":
                if expect_atom:
                    if tokens[i] in "(){},":
                        raise ParseError(f"expected identifier, got {tokens[i]!r}")
                    items.append(tokens[i])
                else:
                    if tokens[i] != ",":
                        raise ParseError(f"expected ',' or '}}', got {tokens[i]!r}")
                i += 1
                expect_atom = not expect_atom
            if i >= len(tokens):
                raise ParseError("unterminated '{' group")
            if expect_atom and items:
                raise ParseError("dangling ',' before '}'")
            i += 1
        else:
            if i >= len(tokens) or tokens[i] in "(){},":
                raise ParseError("expected an identifier inside '(...)'")
            items.append(tokens[i])
            i += 1
        if i >= len(tokens) or tokens[i] != ")":
            raise ParseError("expected ')'")
        i += 1
        if not items:
            raise ParseError("empty assignment group")
        groups.append(items)
    return head, groups


def format_value(value: Value) -> str:
    if isinstance(value, GeneralizedValue):
        inner = ", ".join(f"{p}: {format_value(v)}" for p, v in value.cases.items())
        return "{" + inner + "}"
    if isinstance(value, str):
        return value
    return json.dumps(value)


def repl_eval(engine: PortalEngine, text: str) -> str:
    """Evaluate one expression against the engine's functionals and values."""
    head, groups = parse(text)
    functional = engine.access.functionals.get(head)
    if functional is not None:
        users = engine.access.evaluate_profile(functional, groups)
        return "{" + ", ".join(sorted(users)) + "}"
    gvalue = engine.gvalues.get(head)
    if gvalue is not None:
        value: Value = gvalue
        for group in groups:
            value = apply_assignment(value, set(group))
        return format_value(value)
    raise UnknownName(f"{head!r} names neither a functional nor a generalized value")
