"""Signatures, terms and their textual grammar.

The grammar is deliberately small and whitespace-insensitive::

    signature:  op NAME/ARITY ; op NAME/ARITY ; ...
    term:       NAME  |  NAME(term, ..., term)

A bare NAME inside a term is a variable unless the ambient signature
declares it as a constant; constants may be written with or without
parentheses.  Identifiers are ASCII: a letter followed by letters,
digits or underscores.

Terms are immutable values compared structurally, so they can key
dictionaries and sets.  Depth is 0 for a variable and 1 + max child
depth for an application (constants have depth 1).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Union

from .errors import BoundExceeded, ParseError

__all__ = [
    "Signature",
    "Var",
    "App",
    "Term",
    "parse_signature",
    "parse_term",
    "format_term",
    "vars_of",
    "depth",
    "terms_up_to_depth",
]

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class Var(NamedTuple):
    name: str

    def __str__(self) -> str:
        return format_term(self)


class App(NamedTuple):
    symbol: str
    args: tuple = ()

    def __str__(self) -> str:
        return format_term(self)


Term = Union[Var, App]


@dataclass(frozen=True)
class Signature:
    """Operation symbols with finite nonnegative arities, unique by name."""

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        arities: dict[str, int] = {}
        for name, arity in self.symbols:
            if not isinstance(name, str) or not _IDENT_RE.match(name):
                raise ValueError(f"bad operation name {name!r}")
            if not isinstance(arity, int) or isinstance(arity, bool) or arity < 0:
                raise ValueError(f"arity of {name!r} must be a nonnegative integer")
            if name in arities:
                raise ValueError(f"duplicate symbol {name!r}")
            arities[name] = arity
        object.__setattr__(self, "_arities", arities)

    @classmethod
    def make(cls, symbols: Mapping[str, int] | Iterable[tuple[str, int]]) -> "Signature":
        if isinstance(symbols, Mapping):
            symbols = symbols.items()
        return cls(tuple((str(n), int(a)) for n, a in symbols))

    def __contains__(self, name: str) -> bool:
        return name in self._arities

    def arity(self, name: str) -> int:
        try:
            return self._arities[name]
        except KeyError:
            raise KeyError(f"unknown symbol {name!r}") from None

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.symbols)

    def constants(self) -> tuple[str, ...]:
        return tuple(n for n, a in self.symbols if a == 0)

    def __str__(self) -> str:
        return "; ".join(f"op {n}/{a}" for n, a in self.symbols)


def vars_of(t: Term) -> frozenset[str]:
    """The set of variables occurring in ``t``."""
    if isinstance(t, Var):
        return frozenset((t.name,))
    out: set[str] = set()
    stack = list(t.args)
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            out.add(s.name)
        else:
            stack.extend(s.args)
    return frozenset(out)


def depth(t: Term) -> int:
    """0 for a variable, 1 + max child depth for an application."""
    if isinstance(t, Var):
        return 0
    if not t.args:
        return 1
    return 1 + max(depth(a) for a in t.args)


def format_term(t: Term) -> str:
    """Canonical text: ``x``, ``zero``, ``xor(x,y)``.  Constants print bare."""
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.symbol
    return f"{t.symbol}({','.join(format_term(a) for a in t.args)})"


# --- tokenizing -----------------------------------------------------------

class Token(NamedTuple):
    kind: str   # "name" | "nat" | "punct" | "end"
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<nat>\d+)|(?P<punct>[();,/-])|(?P<bad>\S))"
)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            break
        if m.lastgroup == "bad":
            raise ParseError(f"unexpected character {m.group('bad')!r}", m.start("bad"))
        tokens.append(Token(m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        i = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


def parse_signature(text: str) -> Signature:
    """Parse ``op name/arity`` statements separated by semicolons."""
    tokens = tokenize(text)
    i = 0
    pairs: list[tuple[str, int]] = []
    seen: set[str] = set()
    while tokens[i].kind != "end":
        if tokens[i].text == ";":  # tolerate empty statements
            i += 1
            continue
        if not (tokens[i].kind == "name" and tokens[i].text == "op"):
            raise ParseError("expected 'op'", tokens[i].pos)
        i += 1
        if tokens[i].kind != "name":
            raise ParseError("expected operation name", tokens[i].pos)
        name = tokens[i].text
        if name in seen:
            raise ParseError(f"duplicate symbol {name!r}", tokens[i].pos)
        i += 1
        if tokens[i].text != "/":
            raise ParseError("expected '/'", tokens[i].pos)
        i += 1
        if tokens[i].text == "-":
            raise ParseError("negative arity", tokens[i].pos)
        if tokens[i].kind != "nat":
            raise ParseError("expected arity", tokens[i].pos)
        pairs.append((name, int(tokens[i].text)))
        seen.add(name)
        i += 1
        if tokens[i].text == ";":
            i += 1
        elif tokens[i].kind != "end":
            raise ParseError("expected ';' or end of input", tokens[i].pos)
    return Signature(tuple(pairs))


def parse_term_at(tokens: list[Token], i: int, sig: Signature,
                  variables: frozenset[str] | set[str]) -> tuple[Term, int]:
    """Parse one term starting at token ``i``; returns the term and the
    index of the first token after it.  Shared with the equation parser."""
    tok = tokens[i]
    if tok.kind != "name":
        raise ParseError("expected a variable or operation name", tok.pos)
    name = tok.text
    i += 1
    if tokens[i].text == "(":
        if name not in sig:
            raise ParseError(f"unknown symbol {name!r}", tok.pos)
        want = sig.arity(name)
        i += 1
        args: list[Term] = []
        if tokens[i].text == ")":
            i += 1
        else:
            while True:
                arg, i = parse_term_at(tokens, i, sig, variables)
                args.append(arg)
                if tokens[i].text == ",":
                    i += 1
                    continue
                if tokens[i].text == ")":
                    i += 1
                    break
                raise ParseError("expected ',' or ')'", tokens[i].pos)
        if len(args) != want:
            raise ParseError(
                f"arity mismatch: {name!r} expects {want} argument(s), got {len(args)}",
                tok.pos,
            )
        return App(name, tuple(args)), i
    # bare name: a declared constant wins, otherwise it must be a variable
    if name in sig and sig.arity(name) == 0:
        return App(name, ()), i
    if name in sig:
        raise ParseError(
            f"{name!r} is an operation of arity {sig.arity(name)}, not a constant",
            tok.pos,
        )
    if name not in variables:
        raise ParseError(f"variable {name!r} not declared", tok.pos)
    return Var(name), i


def parse_term(sig: Signature, variables: Iterable[str], text: str) -> Term:
    """Parse a single term over ``sig`` whose variables lie in ``variables``."""
    varset = frozenset(variables)
    tokens = tokenize(text)
    term, i = parse_term_at(tokens, 0, sig, varset)
    if tokens[i].kind != "end":
        raise ParseError("trailing input after term", tokens[i].pos)
    return term


def terms_up_to_depth(sig: Signature, variables: Iterable[str], max_depth: int,
                      max_terms: int | None = None) -> list[Term]:
    """All terms of depth <= max_depth, layered by depth and sorted by
    text inside each layer.  Deterministic order."""
    varnames = sorted(set(variables))
    layers: list[list[Term]] = [[Var(v) for v in varnames]]
    all_terms: list[Term] = list(layers[0])
    total = len(all_terms)
    for d in range(1, max_depth + 1):
        below = [t for layer in layers for t in layer]
        prev = layers[-1]
        prev_set = set(prev)
        layer: list[Term] = []
        for name, k in sig.symbols:
            if k == 0:
                if d == 1:
                    layer.append(App(name, ()))
                continue
            for combo in itertools.product(below, repeat=k):
                # at least one child from the previous layer, so the new
                # application has depth exactly d
                if not any(c in prev_set for c in combo):
                    continue
                layer.append(App(name, combo))
                if max_terms is not None and total + len(layer) > max_terms:
                    raise BoundExceeded("term count", max_terms, total + len(layer))
        layer.sort(key=format_term)
        total += len(layer)
        layers.append(layer)
        all_terms.extend(layer)
    return all_terms
