"""Text expression format for the photon-algebra CLI command.

A script is a sequence of lines; ``#`` starts a comment and blank lines
are skipped.  The first effective line declares the color count::

    N 3

Expressions are rational linear combinations of operator products::

    a(k,mu)      ladder operator, color k (1-based), index mu in 0..3
    ad(k,mu)     its creation partner
    alpha(mu)    symmetric combination  sum_j a(j,mu) / (N-1)
    alphad(mu)   its creation partner
    3/2 * ad(1,0) * a(2,1) - alpha(3)      # coefficients and products

Commands (one per line)::

    COMM <expr> ; <expr>          commutator, printed normal-ordered
    APPLY <expr>                  the state <expr>|0>
    NORM <expr>                   exact <0|expr^dagger expr|0>
    PARITY <expr>                 time parity of <expr>|0>
    SUBSIDIARY <expr> ; r r r r   per-color light-cone condition on
                                  <expr>|0> with the given lightlike
                                  four-vector (exact rationals)

Every output line is deterministic (canonical term ordering, exact
rationals).  Errors carry the line number and the grammar rule that
failed.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional

from .errors import ParseError
from .photon import (
    FockState,
    OperatorPolynomial,
    apply_to_vacuum,
    build_alpha,
    commutator,
    generator,
    inner_product,
    subsidiary_check,
    time_parity,
)

__all__ = ["parse_expression", "evaluate_script", "evaluate_file"]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_]+)|(?P<int>\d+)|(?P<sym>[(),;+\-*/]))"
)

_ATOMS = ("a", "ad", "alpha", "alphad")


class _Tokens:
    def __init__(self, text: str, path: Optional[str], line: int):
        self.path = path
        self.line = line
        self.items = []
        pos = 0
        while pos < len(text):
            match = _TOKEN_RE.match(text, pos)
            if match is None or match.end() == pos:
                rest = text[pos:].strip()
                if not rest:
                    break
                raise ParseError(
                    f"unrecognized input {rest[:20]!r}",
                    path=path, line=line, rule="tokens",
                )
            if match.lastgroup == "name":
                self.items.append(("name", match.group("name")))
            elif match.lastgroup == "int":
                self.items.append(("int", match.group("int")))
            else:
                self.items.append(("sym", match.group("sym")))
            pos = match.end()
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, None)

    def next(self, rule: str):
        if self.pos >= len(self.items):
            raise ParseError(
                "unexpected end of expression", path=self.path, line=self.line, rule=rule
            )
        item = self.items[self.pos]
        self.pos += 1
        return item

    def expect_symbol(self, sym: str, rule: str):
        kind, value = self.next(rule)
        if kind != "sym" or value != sym:
            raise ParseError(
                f"expected {sym!r}, got {value!r}", path=self.path, line=self.line, rule=rule
            )

    def done(self) -> bool:
        return self.pos >= len(self.items)


def _parse_unsigned_integer(tokens: _Tokens, rule: str) -> int:
    kind, value = tokens.next(rule)
    if kind != "int":
        raise ParseError(
            f"expected an integer, got {value!r}",
            path=tokens.path, line=tokens.line, rule=rule,
        )
    return int(value)


def _parse_atom(tokens: _Tokens, n_colors: int) -> OperatorPolynomial:
    kind, name = tokens.next("atom")
    if kind != "name" or name not in _ATOMS:
        raise ParseError(
            f"expected one of {_ATOMS}, got {name!r}",
            path=tokens.path, line=tokens.line, rule="atom",
        )
    tokens.expect_symbol("(", "atom")
    if name in ("a", "ad"):
        color = _parse_unsigned_integer(tokens, "atom")
        if not 1 <= color <= n_colors:
            raise ParseError(
                f"color {color} outside 1..{n_colors}",
                path=tokens.path, line=tokens.line, rule="atom",
            )
        tokens.expect_symbol(",", "atom")
        index = _parse_unsigned_integer(tokens, "atom")
        if index not in (0, 1, 2, 3):
            raise ParseError(
                f"index {index} outside 0..3",
                path=tokens.path, line=tokens.line, rule="atom",
            )
        tokens.expect_symbol(")", "atom")
        return generator(color, index, dagger=name == "ad")
    index = _parse_unsigned_integer(tokens, "atom")
    if index not in (0, 1, 2, 3):
        raise ParseError(
            f"index {index} outside 0..3",
            path=tokens.path, line=tokens.line, rule="atom",
        )
    tokens.expect_symbol(")", "atom")
    return build_alpha(n_colors, index, dagger=name == "alphad")


def _parse_rational(tokens: _Tokens, rule: str) -> Fraction:
    numerator = _parse_unsigned_integer(tokens, rule)
    kind, value = tokens.peek()
    if kind == "sym" and value == "/":
        tokens.next(rule)
        denominator = _parse_unsigned_integer(tokens, rule)
        if denominator == 0:
            raise ParseError(
                "zero denominator", path=tokens.path, line=tokens.line, rule=rule
            )
        return Fraction(numerator, denominator)
    return Fraction(numerator)


def _parse_term(tokens: _Tokens, n_colors: int) -> OperatorPolynomial:
    kind, value = tokens.peek()
    coefficient = Fraction(1)
    if kind == "int":
        coefficient = _parse_rational(tokens, "term")
        kind, value = tokens.peek()
        if kind == "sym" and value == "*":
            tokens.next("term")
        else:
            return OperatorPolynomial.identity() * coefficient
    poly = _parse_atom(tokens, n_colors)
    while True:
        kind, value = tokens.peek()
        if kind == "sym" and value == "*":
            tokens.next("term")
            poly = poly * _parse_atom(tokens, n_colors)
        else:
            break
    return poly * coefficient


def _parse_sum(tokens: _Tokens, n_colors: int) -> OperatorPolynomial:
    kind, value = tokens.peek()
    negate = False
    if kind == "sym" and value in ("+", "-"):
        tokens.next("expression")
        negate = value == "-"
    total = _parse_term(tokens, n_colors)
    if negate:
        total = -total
    while True:
        kind, value = tokens.peek()
        if kind == "sym" and value in ("+", "-"):
            tokens.next("expression")
            term = _parse_term(tokens, n_colors)
            total = total - term if value == "-" else total + term
        else:
            break
    return total


def parse_expression(
    text: str, n_colors: int, path: Optional[str] = None, line: int = 0
) -> OperatorPolynomial:
    """Parse one operator expression."""
    tokens = _Tokens(text, path, line)
    poly = _parse_sum(tokens, n_colors)
    if not tokens.done():
        kind, value = tokens.peek()
        raise ParseError(
            f"unexpected trailing input {value!r}",
            path=path, line=line, rule="expression",
        )
    return poly


def _parse_signed_rational_word(word: str, path, line) -> Fraction:
    try:
        return Fraction(word)
    except (ValueError, ZeroDivisionError):
        raise ParseError(
            f"expected a rational number, got {word!r}",
            path=path, line=line, rule="subsidiary",
        ) from None


def _split_once(body: str, path, line, rule: str):
    if ";" not in body:
        raise ParseError(
            "expected two parts separated by ';'", path=path, line=line, rule=rule
        )
    left, right = body.split(";", 1)
    return left.strip(), right.strip()


def evaluate_script(text: str, path: Optional[str] = None) -> List[str]:
    """Run a script and return its deterministic output lines."""
    n_colors = None
    output = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        keyword = parts[0].upper()
        body = parts[1].strip() if len(parts) > 1 else ""
        if n_colors is None:
            if keyword != "N":
                raise ParseError(
                    "the first statement must declare the color count: N <int>",
                    path=path, line=line_number, rule="n-declaration",
                )
            try:
                n_colors = int(body)
            except ValueError:
                raise ParseError(
                    f"invalid color count {body!r}",
                    path=path, line=line_number, rule="n-declaration",
                ) from None
            if n_colors < 2:
                raise ParseError(
                    f"color count must be at least 2, got {n_colors}",
                    path=path, line=line_number, rule="n-declaration",
                )
            output.append(f"N: {n_colors}")
            continue
        if keyword == "N":
            raise ParseError(
                "the color count is declared once, at the top",
                path=path, line=line_number, rule="n-declaration",
            )
        if keyword == "COMM":
            left, right = _split_once(body, path, line_number, "comm")
            a = parse_expression(left, n_colors, path, line_number)
            b = parse_expression(right, n_colors, path, line_number)
            output.append(f"COMM: {commutator(a, b)}")
        elif keyword == "APPLY":
            poly = parse_expression(body, n_colors, path, line_number)
            output.append(f"APPLY: {apply_to_vacuum(poly)}")
        elif keyword == "NORM":
            poly = parse_expression(body, n_colors, path, line_number)
            state = apply_to_vacuum(poly)
            output.append(f"NORM: {inner_product(state, state)}")
        elif keyword == "PARITY":
            poly = parse_expression(body, n_colors, path, line_number)
            parity = time_parity(apply_to_vacuum(poly))
            text_out = parity if isinstance(parity, str) else f"{parity:+d}"
            output.append(f"PARITY: {text_out}")
        elif keyword == "SUBSIDIARY":
            left, right = _split_once(body, path, line_number, "subsidiary")
            poly = parse_expression(left, n_colors, path, line_number)
            words = right.split()
            if len(words) != 4:
                raise ParseError(
                    f"expected 4 components, got {len(words)}",
                    path=path, line=line_number, rule="subsidiary",
                )
            lam = [_parse_signed_rational_word(w, path, line_number) for w in words]
            try:
                verdicts = subsidiary_check(n_colors, apply_to_vacuum(poly), lam)
            except ValueError as exc:
                raise ParseError(
                    str(exc), path=path, line=line_number, rule="subsidiary"
                ) from None
            rendered = " ".join(
                f"k={k}:{'true' if ok else 'false'}"
                for k, ok in enumerate(verdicts, start=1)
            )
            output.append(f"SUBSIDIARY: {rendered}")
        else:
            raise ParseError(
                f"unknown command {keyword!r}; expected COMM, APPLY, NORM, "
                "PARITY, or SUBSIDIARY",
                path=path, line=line_number, rule="command",
            )
    if n_colors is None:
        raise ParseError(
            "empty script: declare the color count with N <int>",
            path=path, line=1, rule="n-declaration",
        )
    return output


def evaluate_file(path: str) -> List[str]:
    """Run a script file and return its output lines."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ParseError(
            f"cannot read script: {exc}", path=str(path), line=0, rule="io"
        ) from None
    return evaluate_script(text, path=str(path))
