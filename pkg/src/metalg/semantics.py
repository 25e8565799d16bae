"""Valuations, term evaluation and satisfaction of metric equations.

An equation ``X |- s =e t`` holds in an algebra when every valuation of
X sends the two terms to elements at distance at most e.  Satisfaction
is decided by exhaustive enumeration of valuations, in lexicographic
order over (variable name, carrier index) so that the reported witness
is always the least violating valuation, whatever backend runs the
scan.

The scan itself is kernel work: both terms compile to tiny postfix
programs over the operation tables, and distances compare by order rank
(exact, no arithmetic on the distances at all).
"""

from __future__ import annotations

import re
from array import array
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import _kernels
from .errors import BoundExceeded, EvaluationError, ParseError
from .metric import Dist, INF, format_dist, parse_dist
from .algebra import MetricAlgebra
from .terms import Signature, Term, Token, Var, format_term, parse_term_at, vars_of

__all__ = [
    "Valuation",
    "MEquation",
    "SatWitness",
    "eval_term",
    "counterexample",
    "satisfies",
    "first_failure",
    "satisfies_all",
    "sup_distance",
    "sup_distance_table",
    "parse_equations",
    "format_equations",
]


@dataclass(frozen=True)
class Valuation:
    """A total assignment of carrier indices to a sorted variable tuple."""

    names: tuple[str, ...]
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.names) != len(self.values):
            raise ValueError("names and values differ in length")
        if tuple(sorted(self.names)) != self.names:
            raise ValueError("variable names must be sorted")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, int]) -> "Valuation":
        names = tuple(sorted(mapping))
        return cls(names, tuple(int(mapping[x]) for x in names))

    def __getitem__(self, name: str) -> int:
        try:
            return self.values[self.names.index(name)]
        except ValueError:
            raise KeyError(name) from None

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.names, self.values))

    def render(self, a: MetricAlgebra) -> str:
        if not self.names:
            return "(empty valuation)"
        return ", ".join(f"{x}={a.names[v]}" for x, v in zip(self.names, self.values))


@dataclass(frozen=True)
class MEquation:
    """``vars |- lhs =eps rhs`` with a finite nonnegative rational bound."""

    vars: frozenset[str]
    lhs: Term
    rhs: Term
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "vars", frozenset(self.vars))
        eps = self.eps
        if eps == INF or not isinstance(eps, (Fraction, int)) or isinstance(eps, bool):
            raise ValueError("the bound of an equation must be a finite rational")
        eps = Fraction(eps)
        if eps < 0:
            raise ValueError(f"the bound must be nonnegative, got {eps}")
        object.__setattr__(self, "eps", eps)
        free = vars_of(self.lhs) | vars_of(self.rhs)
        if not free <= self.vars:
            raise ValueError(
                f"terms use variables {sorted(free - self.vars)} outside the declared set")

    def render(self) -> str:
        return f"{format_term(self.lhs)} ={format_dist(self.eps)} {format_term(self.rhs)}"

    def vars_clause(self) -> str:
        return ", ".join(sorted(self.vars))


class SatWitness(NamedTuple):
    valuation: Valuation
    distance: Dist


def eval_term(a: MetricAlgebra, valuation, t: Term) -> int:
    """The homomorphic extension of the valuation, by structural
    recursion through the operation tables."""
    if isinstance(valuation, Valuation):
        valuation = valuation.as_dict()
    if isinstance(t, Var):
        try:
            return valuation[t.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {t.name!r}") from None
    if t.symbol not in a.sig:
        raise EvaluationError(f"unknown symbol {t.symbol!r}")
    if a.sig.arity(t.symbol) != len(t.args):
        raise EvaluationError(
            f"{t.symbol!r} has arity {a.sig.arity(t.symbol)}, got {len(t.args)} arguments")
    return a.apply(t.symbol, tuple(eval_term(a, valuation, s) for s in t.args))


def _compile(a: MetricAlgebra, slots: Mapping[str, int], t: Term) -> list[int]:
    """Postfix program over variable slots and operation ids."""
    op_ids = a.kernel_tables[0]
    nv = len(slots)
    prog: list[int] = []

    def walk(node: Term):
        if isinstance(node, Var):
            try:
                prog.append(slots[node.name])
            except KeyError:
                raise EvaluationError(f"unbound variable {node.name!r}") from None
            return
        if node.symbol not in a.sig:
            raise EvaluationError(f"unknown symbol {node.symbol!r}")
        if a.sig.arity(node.symbol) != len(node.args):
            raise EvaluationError(
                f"{node.symbol!r} has arity {a.sig.arity(node.symbol)}, "
                f"got {len(node.args)} arguments")
        for child in node.args:
            walk(child)
        prog.append(nv + op_ids[node.symbol])

    walk(t)
    return prog


def _guard_valuations(a: MetricAlgebra, nvars: int, max_valuations: int) -> int:
    total = a.n ** nvars
    if total > max_valuations:
        raise BoundExceeded("valuation count", max_valuations, total)
    return total


def _valuation_at(names: Sequence[str], n: int, v_idx: int) -> Valuation:
    values = []
    for _ in names:
        values.append(v_idx % n)
        v_idx //= n
    values.reverse()
    return Valuation(tuple(names), tuple(values))


def counterexample(a: MetricAlgebra, e: MEquation,
                   max_valuations: int = 10 ** 6) -> SatWitness | None:
    """The least valuation violating the equation, with its distance, or
    None when the algebra satisfies the equation."""
    names = sorted(e.vars)
    _guard_valuations(a, len(names), max_valuations)
    slots = {x: i for i, x in enumerate(names)}
    _, arity, offsets, tables = a.kernel_tables
    drank, values = a.dist.ranks()
    eps_rank = bisect_right(values, e.eps) - 1
    prog_l = array("q", _compile(a, slots, e.lhs))
    prog_r = array("q", _compile(a, slots, e.rhs))
    rank, v_idx = _kernels.impl.eval_scan(
        len(names), a.n, prog_l, prog_r, arity, offsets, tables, drank, eps_rank)
    if v_idx < 0:
        return None
    return SatWitness(_valuation_at(names, a.n, v_idx), values[rank])


def satisfies(a: MetricAlgebra, e: MEquation, max_valuations: int = 10 ** 6) -> bool:
    """True iff every valuation keeps the two terms within the bound."""
    return counterexample(a, e, max_valuations) is None


def first_failure(a: MetricAlgebra, theory: Iterable[MEquation],
                  max_valuations: int = 10 ** 6):
    """The first equation of the theory that fails, with its witness."""
    for e in theory:
        w = counterexample(a, e, max_valuations)
        if w is not None:
            return (e, w)
    return None


def satisfies_all(a: MetricAlgebra, theory: Iterable[MEquation],
                  max_valuations: int = 10 ** 6) -> bool:
    return first_failure(a, theory, max_valuations) is None


def sup_distance(a: MetricAlgebra, variables: Iterable[str], s: Term, t: Term,
                 max_valuations: int = 10 ** 6) -> Dist:
    """max over all valuations of d(eval(s), eval(t)); INF possible."""
    names = sorted(set(variables))
    _guard_valuations(a, len(names), max_valuations)
    slots = {x: i for i, x in enumerate(names)}
    _, arity, offsets, tables = a.kernel_tables
    drank, values = a.dist.ranks()
    prog_l = array("q", _compile(a, slots, s))
    prog_r = array("q", _compile(a, slots, t))
    rank, _ = _kernels.impl.eval_scan(
        len(names), a.n, prog_l, prog_r, arity, offsets, tables, drank, -1)
    return values[rank]


def _value_vectors(a: MetricAlgebra, names: Sequence[str], terms: Sequence[Term],
                   total: int) -> list[tuple[int, ...]]:
    """Evaluation vector of each term over all valuations, computed
    bottom-up so shared subterms are evaluated once."""
    n = a.n
    nv = len(names)
    cache: dict[Term, tuple[int, ...]] = {}
    for j, x in enumerate(names):
        # valuation index in base n, variable j's digit
        period = n ** (nv - 1 - j)
        vec = tuple((idx // period) % n for idx in range(total))
        cache[Var(x)] = vec

    def vector(term: Term) -> tuple[int, ...]:
        got = cache.get(term)
        if got is not None:
            return got
        if isinstance(term, Var):
            raise EvaluationError(f"unbound variable {term.name!r}")
        child_vecs = [vector(c) for c in term.args]
        table = a.table(term.symbol)
        if child_vecs:
            out = []
            for idx in range(total):
                flat = 0
                for cv in child_vecs:
                    flat = flat * n + cv[idx]
                out.append(table[flat])
            vec = tuple(out)
        else:
            vec = (table[0],) * total
        cache[term] = vec
        return vec

    return [vector(t) for t in terms]


def sup_distance_table(a: MetricAlgebra, variables: Iterable[str],
                       terms: Sequence[Term],
                       max_valuations: int = 10 ** 6) -> list[list[Dist]]:
    """Pairwise sup distances between the given terms, as a symmetric
    matrix.  Terms with identical evaluation vectors are deduplicated
    before the quadratic scan."""
    names = sorted(set(variables))
    total = _guard_valuations(a, len(names), max_valuations)
    vectors = _value_vectors(a, names, terms, total)
    distinct: dict[tuple[int, ...], int] = {}
    classes = []
    for vec in vectors:
        cls = distinct.setdefault(vec, len(distinct))
        classes.append(cls)
    reps = [None] * len(distinct)
    for vec, cls in distinct.items():
        reps[cls] = vec
    m = len(reps)
    flat = array("q", [x for vec in reps for x in vec])
    drank, values = a.dist.ranks()
    ranks = _kernels.impl.pairwise_sup(m, total, flat, drank, a.n)
    return [[values[ranks[classes[i] * m + classes[j]]] for j in range(len(terms))]
            for i in range(len(terms))]


# --- the equation file grammar --------------------------------------------

_EQ_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<eps>=(?:inf|[0-9]+(?:\.[0-9]+)?(?:/[0-9]+)?))"
    r"|(?P<punct>[();,])"
    r"|(?P<bad>\S))"
)


def _tokenize_equations(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    while i < len(text):
        m = _EQ_TOKEN_RE.match(text, i)
        if m is None:
            break
        if m.lastgroup == "bad":
            raise ParseError(f"unexpected character {m.group('bad')!r}", m.start("bad"))
        tokens.append(Token(m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        i = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def parse_equations(sig: Signature, text: str) -> list[MEquation]:
    """Parse an equation file::

        vars x, y;
        eq xor(x,y) =0 xor(y,x);
        eq x =1 y;

    A ``vars`` statement sets the variable set for the following ``eq``
    statements.  The bound is attached to ``=`` as a distance literal
    (``=0``, ``=1/2``, ``=0.25``) and must be finite.  ``#`` starts a
    comment."""
    tokens = _tokenize_equations(_strip_comments(text))
    i = 0
    current: frozenset[str] = frozenset()
    out: list[MEquation] = []
    while tokens[i].kind != "end":
        tok = tokens[i]
        if tok.text == ";":
            i += 1
            continue
        if tok.kind != "name" or tok.text not in ("vars", "eq"):
            raise ParseError("expected 'vars' or 'eq'", tok.pos)
        if tok.text == "vars":
            i += 1
            names: list[str] = []
            while True:
                if tokens[i].kind != "name":
                    raise ParseError("expected a variable name", tokens[i].pos)
                names.append(tokens[i].text)
                i += 1
                if tokens[i].text == ",":
                    i += 1
                    continue
                break
            current = frozenset(names)
        else:
            i += 1
            lhs, i = parse_term_at(tokens, i, sig, current)
            if tokens[i].kind != "eps":
                raise ParseError("expected '=<distance>'", tokens[i].pos)
            eps_text = tokens[i].text[1:]
            if eps_text == "inf":
                raise ParseError("the bound of an equation must be finite", tokens[i].pos)
            eps = parse_dist(eps_text)
            i += 1
            rhs, i = parse_term_at(tokens, i, sig, current)
            out.append(MEquation(current, lhs, rhs, eps))
        if tokens[i].text == ";":
            i += 1
        elif tokens[i].kind != "end":
            raise ParseError("expected ';' or end of input", tokens[i].pos)
    return out


def format_equations(eqs: Sequence[MEquation]) -> str:
    """Render equations in the file grammar, grouping ``vars`` lines."""
    lines: list[str] = []
    current: frozenset[str] | None = None
    for e in eqs:
        if e.vars != current:
            current = e.vars
            if current:
                lines.append(f"vars {', '.join(sorted(current))};")
        lines.append(f"eq {e.render()};")
    return "\n".join(lines) + ("\n" if lines else "")
