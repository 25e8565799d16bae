"""Shared builders and independent oracles for the test suite.

The oracles recompute everything from first principles (plain loops over
raw tables and matrices, no kernels, no library evaluation paths) so the
tests can compare library answers against genuinely independent ones.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from metalg import MetricAlgebra, Partition, Signature, Var

F = Fraction


# --- builders ---------------------------------------------------------------

def xor_algebra(d=F(1)) -> MetricAlgebra:
    return MetricAlgebra.make(
        Signature.make({"xor": 2}), ["0", "1"],
        [[F(0), d], [d, F(0)]], {"xor": [[0, 1], [1, 0]]})


def negation_algebra(d=F(1)) -> MetricAlgebra:
    return MetricAlgebra.make(
        Signature.make({"u": 1}), ["0", "1"],
        [[F(0), d], [d, F(0)]], {"u": [1, 0]})


GROUP_SIG = Signature.make({"add": 2, "zero": 0})


def z4_algebra() -> MetricAlgebra:
    return MetricAlgebra.make(
        GROUP_SIG, ["0", "1", "2", "3"],
        [[F(0) if i == j else F(1) for j in range(4)] for i in range(4)],
        {"add": [[(i + j) % 4 for j in range(4)] for i in range(4)], "zero": 0})


def z2_algebra() -> MetricAlgebra:
    return MetricAlgebra.make(
        GROUP_SIG, ["0", "1"], [[F(0), F(1)], [F(1), F(0)]],
        {"add": [[0, 1], [1, 0]], "zero": 0})


def one_point_algebra(sig: Signature) -> MetricAlgebra:
    ops = {name: [0] * (1 ** arity) if arity else 0 for name, arity in sig.symbols}
    return MetricAlgebra.make(sig, ["p"], [[F(0)]], ops)


# --- independent oracles ----------------------------------------------------

def oracle_metric_violations(rows) -> list[tuple]:
    """All axiom violations, by unrestricted definition-level loops."""
    n = len(rows)
    out = []
    for i in range(n):
        if rows[i][i] != 0:
            out.append(("zero-diagonal", i))
    for i in range(n):
        for j in range(n):
            if rows[i][j] != rows[j][i]:
                out.append(("symmetry", i, j))
            if i != j and rows[i][j] == 0:
                out.append(("identity-of-indiscernibles", i, j))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if rows[i][j] + rows[j][k] < rows[i][k]:
                    out.append(("triangle", i, k, j))
    return out


def oracle_closure(rows):
    """Plain Floyd-Warshall over exact values."""
    n = len(rows)
    d = [list(r) for r in rows]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def random_metric_rows(rng, n, values=None):
    """A valid metric: symmetric positive rational weights closed under
    shortest paths."""
    if values is None:
        values = [F(1), F(1, 2), F(3, 2), F(2), F(1, 3), F(5, 2), F(3)]
    rows = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w = rng.choice(values)
            rows[i][j] = rows[j][i] = w
    return [tuple(r) for r in oracle_closure(rows)]


def random_tables(rng, sig: Signature, n: int):
    ops = {}
    for name, k in sig.symbols:
        ops[name] = [rng.randrange(n) for _ in range(n ** k)] if k else rng.randrange(n)
    return ops


def raw_table(a: MetricAlgebra, symbol: str):
    return dict(a.ops)[symbol]


def oracle_apply(a: MetricAlgebra, symbol: str, args) -> int:
    table = raw_table(a, symbol)
    idx = 0
    for x in args:
        idx = idx * a.n + x
    return table[idx]


def oracle_eval(a: MetricAlgebra, assignment: dict, term) -> int:
    if isinstance(term, Var):
        return assignment[term.name]
    return oracle_apply(a, term.symbol, [oracle_eval(a, assignment, s) for s in term.args])


def oracle_sup_distance(a: MetricAlgebra, variables, s, t):
    """max over all valuations of d(eval s, eval t) by direct loops."""
    names = sorted(set(variables))
    best = F(0)
    for values in itertools.product(range(a.n), repeat=len(names)):
        v = dict(zip(names, values))
        d = a.dist[oracle_eval(a, v, s), oracle_eval(a, v, t)]
        if d > best:
            best = d
    return best


def oracle_satisfies(a: MetricAlgebra, variables, s, t, eps) -> bool:
    return oracle_sup_distance(a, variables, s, t) <= eps


def oracle_partitions(n: int) -> list[frozenset]:
    """All set partitions of range(n) by recursive insertion, as
    frozensets of frozensets (order-free, independent of the library's
    growth-string enumeration)."""
    if n == 0:
        return []
    parts: list[list[list[int]]] = [[[0]]]
    for x in range(1, n):
        new = []
        for p in parts:
            for i in range(len(p)):
                q = [list(b) for b in p]
                q[i].append(x)
                new.append(q)
            new.append([list(b) for b in p] + [[x]])
        parts = new
    return [frozenset(frozenset(b) for b in p) for p in parts]


def oracle_is_congruence(a: MetricAlgebra, p: Partition) -> bool:
    """Full definition: any two componentwise-equivalent argument tuples
    give equivalent results."""
    block = [p.block_of(i) for i in range(a.n)]
    for name, k in a.sig.symbols:
        for xs in itertools.product(range(a.n), repeat=k):
            for ys in itertools.product(range(a.n), repeat=k):
                if all(block[x] == block[y] for x, y in zip(xs, ys)):
                    if block[oracle_apply(a, name, xs)] != block[oracle_apply(a, name, ys)]:
                        return False
    return True


def oracle_quantitative_violations(a: MetricAlgebra) -> list[tuple]:
    """All expansion witnesses by full tuple-pair enumeration."""
    out = []
    for name, k in a.sig.symbols:
        if k == 0:
            continue
        for xs in itertools.product(range(a.n), repeat=k):
            for ys in itertools.product(range(a.n), repeat=k):
                d_in = max(a.dist[x, y] for x, y in zip(xs, ys))
                d_out = a.dist[oracle_apply(a, name, xs), oracle_apply(a, name, ys)]
                if d_out > d_in:
                    out.append((name, xs, ys))
    return out


def partition_as_sets(p: Partition) -> frozenset:
    return frozenset(frozenset(b) for b in p.blocks)
