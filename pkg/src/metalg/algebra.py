"""Finite metric algebras and their constructions.

A ``MetricAlgebra`` is a finite carrier (elements are indices with
display names), an exact extended-distance matrix and one total
operation table per signature symbol.  This module implements the
structural toolkit: validation, the non-expansiveness check that
separates metric from quantitative algebras, homomorphism checking,
products with the sup metric, generated subalgebras, congruence
enumeration, canonical quotients, quotient factorization and metric
scaling.

All values are immutable and all operations pure; everything here is
deterministic, including which witness is reported when a check fails
(first hit in lexicographic scan order).
"""

from __future__ import annotations

import itertools
from array import array
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

from . import _kernels
from .errors import BoundExceeded, FactorizationError, NotACongruence, ParseError
from .metric import (Dist, DistMatrix, Partition, all_partitions,
                     check_metric_axioms, dist_from_json, dist_to_json,
                     quotient_metric, sup_product)
from .terms import Signature

__all__ = [
    "MetricAlgebra",
    "Homomorphism",
    "HomDefect",
    "ExpansionWitness",
    "validate_algebra",
    "is_quantitative",
    "quantitative_witness",
    "check_homomorphism",
    "ProductResult",
    "m_product",
    "SubalgebraResult",
    "generated_subalgebra",
    "enumerate_congruences",
    "QuotientResult",
    "m_quotient",
    "factor_homomorphism",
    "factor_m_homomorphism",
    "ScaleResult",
    "scale_metric",
]


def _flat_table(name: str, arity: int, n: int, table) -> tuple[int, ...]:
    """Normalize a table given as an int (constant), a flat sequence of
    length n**arity, or nested sequences of depth ``arity``."""
    if arity == 0:
        if isinstance(table, (list, tuple)):
            if len(table) != 1:
                raise ValueError(f"constant {name!r} table must be a single element")
            table = table[0]
        return (int(table),)
    if isinstance(table, Sequence) and not isinstance(table, str):
        flat = list(table)
        if flat and isinstance(flat[0], Sequence) and not isinstance(flat[0], str):
            # nested rows: flatten arity levels
            def walk(node, level):
                if level == 0:
                    if isinstance(node, Sequence) and not isinstance(node, str):
                        raise ValueError(
                            f"table for {name!r} nests deeper than arity {arity}")
                    yield int(node)
                    return
                if not isinstance(node, Sequence) or isinstance(node, str) or len(node) != n:
                    raise ValueError(
                        f"table for {name!r} must nest {arity} levels of length {n}")
                for child in node:
                    yield from walk(child, level - 1)
            flat = list(walk(table, arity))
        if len(flat) != n ** arity:
            raise ValueError(
                f"table for {name!r} has {len(flat)} entries, expected {n ** arity}")
        return tuple(int(x) for x in flat)
    raise ValueError(f"bad table for {name!r}")


@dataclass(frozen=True)
class MetricAlgebra:
    """Finite metric algebra: signature, named carrier, distances, tables.

    Tables are stored flat in row-major order (first argument most
    significant).  Construction validates shapes; out-of-range table
    entries and broken metric axioms are reported by
    ``validate_algebra`` so that defective candidates can be built and
    examined."""

    sig: Signature
    names: tuple[str, ...]
    dist: DistMatrix
    ops: tuple[tuple[str, tuple[int, ...]], ...]

    def __post_init__(self):
        if len(self.names) != self.dist.n:
            raise ValueError(
                f"{len(self.names)} names for a metric on {self.dist.n} points")
        if len(set(self.names)) != len(self.names):
            raise ValueError("carrier names must be unique")
        got = {name for name, _ in self.ops}
        want = set(self.sig.names())
        if got != want:
            raise ValueError(f"tables {sorted(got)} do not match signature {sorted(want)}")
        n = self.dist.n
        for name, table in self.ops:
            if len(table) != n ** self.sig.arity(name):
                raise ValueError(f"table for {name!r} has the wrong size")
        object.__setattr__(self, "ops", tuple(sorted(self.ops)))

    @classmethod
    def make(cls, sig: Signature, names: Sequence[str], dist, ops: Mapping) -> "MetricAlgebra":
        """Build from friendly inputs: ``dist`` as rows of distance values
        (coerced with as_dist) or a DistMatrix, ``ops`` as a mapping from
        symbol to nested/flat table."""
        names = tuple(str(x) for x in names)
        if not isinstance(dist, DistMatrix):
            dist = DistMatrix.from_literals(dist)
        n = dist.n
        tables = tuple(
            (name, _flat_table(name, sig.arity(name), n, ops[name]))
            for name, _ in sig.symbols)
        return cls(sig, names, dist, tables)

    @property
    def n(self) -> int:
        return self.dist.n

    @cached_property
    def _tables(self) -> dict[str, tuple[int, ...]]:
        return dict(self.ops)

    @cached_property
    def _name_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def table(self, symbol: str) -> tuple[int, ...]:
        return self._tables[symbol]

    def apply(self, symbol: str, args: Sequence[int]) -> int:
        table = self._tables[symbol]
        idx = 0
        for a in args:
            idx = idx * self.n + a
        return table[idx]

    def element(self, name: str) -> int:
        try:
            return self._name_index[name]
        except KeyError:
            raise KeyError(f"no carrier element named {name!r}") from None

    @cached_property
    def kernel_tables(self):
        """Kernel-ready encoding: (op ids, arity array, offset array,
        concatenated tables)."""
        op_ids = {name: i for i, (name, _) in enumerate(self.ops)}
        arity = array("q", [self.sig.arity(name) for name, _ in self.ops])
        offsets = array("q", [0] * len(self.ops))
        concat: list[int] = []
        for i, (_, table) in enumerate(self.ops):
            offsets[i] = len(concat)
            concat.extend(table)
        return op_ids, arity, offsets, array("q", concat)

    # --- the algebra file format -------------------------------------

    def to_json_dict(self) -> dict:
        ops: dict[str, object] = {}
        for name, table in self.ops:
            k = self.sig.arity(name)
            if k == 0:
                ops[name] = self.names[table[0]]
                continue

            def nest(level: int, base: int, stride: int):
                if level == 0:
                    return self.names[table[base]]
                stride //= self.n
                return [nest(level - 1, base + i * stride, stride) for i in range(self.n)]

            ops[name] = nest(k, 0, len(table))
        return {
            "signature": [{"name": n, "arity": a} for n, a in self.sig.symbols],
            "carrier": list(self.names),
            "dist": [[dist_to_json(v) for v in row] for row in self.dist.entries],
            "ops": ops,
        }

    @classmethod
    def from_json_dict(cls, data) -> "MetricAlgebra":
        if not isinstance(data, dict):
            raise ParseError("algebra file must be a JSON object")
        try:
            sig_items = data["signature"]
            carrier = data["carrier"]
            dist_rows = data["dist"]
            ops = data["ops"]
        except KeyError as exc:
            raise ParseError(f"algebra file is missing field {exc}") from None
        if not isinstance(sig_items, list):
            raise ParseError("signature must be a list of {name, arity} objects")
        try:
            sig = Signature.make([(s["name"], s["arity"]) for s in sig_items])
        except (TypeError, KeyError, ValueError) as exc:
            raise ParseError(f"bad signature: {exc}") from None
        if not isinstance(carrier, list):
            raise ParseError("carrier must be a list of element names")
        names = tuple(str(x) for x in carrier)
        if len(set(names)) != len(names) or not names:
            raise ParseError("carrier must be a nonempty list of distinct names")
        index = {name: i for i, name in enumerate(names)}
        n = len(names)
        if (not isinstance(dist_rows, list) or len(dist_rows) != n
                or any(not isinstance(r, list) or len(r) != n for r in dist_rows)):
            raise ParseError(f"dist must be a {n}x{n} array")
        dist = DistMatrix(tuple(
            tuple(dist_from_json(v) for v in row) for row in dist_rows))

        def resolve(node, level: int, path: str):
            if level == 0:
                if not isinstance(node, str) or node not in index:
                    raise ParseError(f"ops{path}: {node!r} is not a carrier element")
                return index[node]
            if not isinstance(node, list) or len(node) != n:
                raise ParseError(f"ops{path}: expected a list of length {n}")
            out = []
            for i, child in enumerate(node):
                sub = resolve(child, level - 1, f"{path}[{i}]")
                out.append(sub)
            return out

        if not isinstance(ops, dict):
            raise ParseError("ops must be an object")
        tables = {}
        for name, a in sig.symbols:
            if name not in ops:
                raise ParseError(f"ops is missing a table for {name!r}")
            resolved = resolve(ops[name], a, f".{name}")
            tables[name] = resolved
        extra = set(ops) - {name for name, _ in sig.symbols}
        if extra:
            raise ParseError(f"ops has tables for unknown symbols {sorted(extra)}")
        try:
            return cls.make(sig, names, dist, tables)
        except ValueError as exc:
            raise ParseError(str(exc)) from None


def validate_algebra(a: MetricAlgebra) -> list[str]:
    """All invariant defects, as human-readable strings; empty means valid."""
    defects: list[str] = []
    v = check_metric_axioms(a.dist.entries)
    if v is not None:
        defects.append(f"metric: {v.describe()} (axiom: {v.kind})")
    n = a.n
    for name, table in a.ops:
        k = a.sig.arity(name)
        for flat_idx, value in enumerate(table):
            if not (0 <= value < n):
                args = []
                rem = flat_idx
                for _ in range(k):
                    args.append(rem % n)
                    rem //= n
                args.reverse()
                defects.append(
                    f"op {name!r}: entry at args {tuple(args)} out of range: {value}")
    return defects


@dataclass(frozen=True)
class ExpansionWitness:
    """An operation that expands the sup distance on some tuple pair."""

    symbol: str
    left: tuple[int, ...]
    right: tuple[int, ...]
    output_distance: Dist
    input_distance: Dist

    def describe(self) -> str:
        return (f"{self.symbol}{self.left} vs {self.symbol}{self.right}: "
                f"output distance {self.output_distance} exceeds "
                f"input sup distance {self.input_distance}")


def quantitative_witness(a: MetricAlgebra) -> ExpansionWitness | None:
    """First operation-expansion witness, or None when every operation is
    non-expansive from the sup metric on tuples."""
    drank, values = a.dist.ranks()
    n = a.n
    for name, table in a.ops:
        k = a.sig.arity(name)
        if k == 0:
            continue
        hit = _kernels.impl.nonexpansive_scan(k, n, array("q", table), drank)
        if hit is not None:
            xs, ys = hit
            d_out = a.dist[a.apply(name, xs), a.apply(name, ys)]
            d_in = max(a.dist[x, y] for x, y in zip(xs, ys))
            return ExpansionWitness(name, xs, ys, d_out, d_in)
    return None


def is_quantitative(a: MetricAlgebra) -> bool:
    return quantitative_witness(a) is None


@dataclass(frozen=True)
class Homomorphism:
    """A verified operation-preserving map with computed metric flags."""

    source: MetricAlgebra
    target: MetricAlgebra
    mapping: tuple[int, ...]
    non_expansive: bool
    surjective: bool
    isometric: bool

    def __call__(self, i: int) -> int:
        return self.mapping[i]

    @property
    def is_m_homomorphism(self) -> bool:
        return self.non_expansive


@dataclass(frozen=True)
class HomDefect:
    """Where a candidate map fails to preserve an operation."""

    symbol: str
    args: tuple[int, ...]
    mapped_result: int
    result_of_mapped: int

    def describe(self) -> str:
        return (f"map does not preserve {self.symbol} at args {self.args}: "
                f"f({self.symbol}(args)) = {self.mapped_result} but "
                f"{self.symbol}(f(args)) = {self.result_of_mapped}")


def check_homomorphism(mapping: Sequence[int], a: MetricAlgebra,
                       b: MetricAlgebra) -> Union[Homomorphism, HomDefect]:
    """Verify that ``mapping`` preserves every operation; on success the
    returned homomorphism carries computed non-expansive / surjective /
    isometric flags, otherwise the first defect is returned."""
    if a.sig != b.sig:
        raise ValueError("source and target have different signatures")
    f = tuple(int(x) for x in mapping)
    if len(f) != a.n:
        raise ValueError(f"map has {len(f)} entries for a carrier of {a.n}")
    if any(not (0 <= x < b.n) for x in f):
        raise ValueError("map image leaves the target carrier")
    for name, _ in a.ops:
        k = a.sig.arity(name)
        for args in itertools.product(range(a.n), repeat=k):
            lhs = f[a.apply(name, args)]
            rhs = b.apply(name, tuple(f[x] for x in args))
            if lhs != rhs:
                return HomDefect(name, args, lhs, rhs)
    non_expansive = True
    isometric = True
    for i in range(a.n):
        for j in range(i + 1, a.n):
            da = a.dist[i, j]
            db = b.dist[f[i], f[j]]
            if db > da:
                non_expansive = False
            if db != da:
                isometric = False
        if not non_expansive and not isometric:
            break
    surjective = len(set(f)) == b.n
    return Homomorphism(a, b, f, non_expansive, surjective, isometric)


def _expect_hom(mapping, a, b, context: str) -> Homomorphism:
    h = check_homomorphism(mapping, a, b)
    assert isinstance(h, Homomorphism), f"{context}: {h.describe()}"
    return h


class ProductResult(NamedTuple):
    algebra: MetricAlgebra
    projections: tuple[Homomorphism, ...]


def m_product(algebras: Sequence[MetricAlgebra], sig: Signature | None = None,
              max_size: int = 10 ** 6) -> ProductResult:
    """Product algebra with pointwise operations and the sup metric.

    The empty product is the one-point algebra over ``sig`` (which must
    then be given).  Carrier and table sizes are guarded by
    ``max_size``."""
    if algebras:
        sig = algebras[0].sig
        for a in algebras[1:]:
            if a.sig != sig:
                raise ValueError("product factors have different signatures")
    elif sig is None:
        raise ValueError("empty product needs an explicit signature")
    sizes = [a.n for a in algebras]
    total = 1
    for s in sizes:
        total *= s
    if total > max_size:
        raise BoundExceeded("product carrier size", max_size, total)
    for name, k in sig.symbols:
        if total ** k > max_size:
            raise BoundExceeded(f"product table cells for '{name}'", max_size, total ** k)
    elements = list(itertools.product(*(range(s) for s in sizes)))
    index = {e: i for i, e in enumerate(elements)}
    tables = {}
    for name, k in sig.symbols:
        table = []
        for args in itertools.product(range(total), repeat=k):
            tuples = [elements[x] for x in args]
            result = tuple(
                a.apply(name, tuple(t[pos] for t in tuples))
                for pos, a in enumerate(algebras))
            table.append(index[result])
        tables[name] = table
    names = tuple("(" + ",".join(a.names[e[pos]] for pos, a in enumerate(algebras)) + ")"
                  for e in elements)
    dist = sup_product([a.dist for a in algebras])
    prod = MetricAlgebra.make(sig, names, dist, tables)
    projections = tuple(
        _expect_hom([e[pos] for e in elements], prod, a, "product projection")
        for pos, a in enumerate(algebras))
    return ProductResult(prod, projections)


class SubalgebraResult(NamedTuple):
    algebra: MetricAlgebra
    embedding: Homomorphism


def generated_subalgebra(a: MetricAlgebra, gens: Iterable[int]) -> SubalgebraResult:
    """Least operation-closed subset containing ``gens`` (plus all
    constants), with the induced metric; the embedding is an isometric
    injective homomorphism."""
    current = set(int(g) for g in gens)
    for g in current:
        if not (0 <= g < a.n):
            raise ValueError(f"generator {g} outside the carrier")
    if not current and not a.sig.constants():
        raise ValueError("no generators and no constants: the closure would be empty")
    changed = True
    while changed:
        changed = False
        for name, _ in a.ops:
            k = a.sig.arity(name)
            for args in itertools.product(sorted(current), repeat=k):
                r = a.apply(name, args)
                if r not in current:
                    current.add(r)
                    changed = True
    sub = sorted(current)
    back = {old: new for new, old in enumerate(sub)}
    tables = {}
    for name, _ in a.ops:
        k = a.sig.arity(name)
        tables[name] = [back[a.apply(name, args)]
                        for args in itertools.product(sub, repeat=k)]
    dist = DistMatrix(tuple(tuple(a.dist[i, j] for j in sub) for i in sub))
    algebra = MetricAlgebra.make(a.sig, [a.names[i] for i in sub], dist, tables)
    embedding = _expect_hom(sub, algebra, a, "subalgebra embedding")
    return SubalgebraResult(algebra, embedding)


def _congruence_witness(a: MetricAlgebra, p: Partition):
    """None if ``p`` is compatible with every table.  Compatibility in
    one argument position at a time suffices: replacing coordinates one
    by one chains through transitivity."""
    for name, _ in a.ops:
        k = a.sig.arity(name)
        if k == 0:
            continue
        for args in itertools.product(range(a.n), repeat=k):
            base = p.block_of(a.apply(name, args))
            for pos in range(k):
                for alt in p.blocks[p.block_of(args[pos])]:
                    if alt == args[pos]:
                        continue
                    changed = list(args)
                    changed[pos] = alt
                    if p.block_of(a.apply(name, changed)) != base:
                        return (name, args, pos, alt)
    return None


def enumerate_congruences(a: MetricAlgebra, max_size: int = 6) -> list[Partition]:
    """All partitions compatible with every operation table.  Guarded by
    ``max_size`` because the number of partitions grows like the Bell
    numbers."""
    if a.n > max_size:
        raise BoundExceeded("congruence enumeration carrier size", max_size, a.n)
    return [p for p in all_partitions(a.n) if _congruence_witness(a, p) is None]


class QuotientResult(NamedTuple):
    algebra: MetricAlgebra
    projection: Homomorphism
    quantitative_preserved: bool | None


def m_quotient(a: MetricAlgebra, p: Partition) -> QuotientResult:
    """Quotient by a congruence with the canonical greatest quotient
    metric.  The projection is a surjective non-expansive homomorphism.

    ``quantitative_preserved`` reports whether the quotient of a
    quantitative algebra is still quantitative (the canonical metric
    does not guarantee it); None when the source is not quantitative."""
    if p.n != a.n:
        raise ValueError(f"partition of {p.n} points for a carrier of {a.n}")
    w = _congruence_witness(a, p)
    if w is not None:
        raise NotACongruence(*w)
    reps = [b[0] for b in p.blocks]
    nb = p.num_blocks
    tables = {}
    for name, _ in a.ops:
        k = a.sig.arity(name)
        tables[name] = [
            p.block_of(a.apply(name, tuple(reps[x] for x in args)))
            for args in itertools.product(range(nb), repeat=k)]
    names = tuple("{" + ",".join(a.names[i] for i in b) + "}" for b in p.blocks)
    dist = quotient_metric(a.dist, p)
    q = MetricAlgebra.make(a.sig, names, dist, tables)
    proj = _expect_hom([p.block_of(i) for i in range(a.n)], a, q, "quotient projection")
    assert proj.surjective and proj.non_expansive, "canonical quotient metric failed"
    preserved = is_quantitative(q) if is_quantitative(a) else None
    return QuotientResult(q, proj, preserved)


def _common_source(p: Homomorphism, q: Homomorphism):
    if p.source != q.source:
        raise FactorizationError("the homomorphisms have different sources")
    if not p.surjective:
        raise FactorizationError("p is not surjective")
    if not q.surjective:
        raise FactorizationError("q is not surjective")


def _build_factor(p: Homomorphism, q: Homomorphism) -> tuple[int, ...]:
    h = [-1] * p.target.n
    for x in range(p.source.n):
        u = p.mapping[x]
        if h[u] == -1:
            h[u] = q.mapping[x]
    return tuple(h)


def factor_homomorphism(p: Homomorphism, q: Homomorphism) -> Homomorphism:
    """The unique map h with h . p = q, for surjective homomorphisms p, q
    out of the same algebra whose kernels are compatible: p(a) = p(b)
    must imply q(a) = q(b).  h is surjective."""
    _common_source(p, q)
    n = p.source.n
    for i in range(n):
        for j in range(i + 1, n):
            if p.mapping[i] == p.mapping[j] and q.mapping[i] != q.mapping[j]:
                raise FactorizationError(
                    "kernel condition fails: p identifies a pair that q separates",
                    witness=(i, j))
    h = _build_factor(p, q)
    hom = _expect_hom(h, p.target, q.target, "factor map")
    assert all(hom.mapping[p.mapping[x]] == q.mapping[x] for x in range(n))
    assert hom.surjective
    return hom


def factor_m_homomorphism(p: Homomorphism, q: Homomorphism) -> Homomorphism:
    """Metric version: p, q surjective non-expansive homomorphisms, and
    d(q(a), q(b)) <= d(p(a), p(b)) for all pairs; the factor map is then
    non-expansive as well."""
    _common_source(p, q)
    if not p.non_expansive:
        raise FactorizationError("p is not non-expansive")
    if not q.non_expansive:
        raise FactorizationError("q is not non-expansive")
    n = p.source.n
    for i in range(n):
        for j in range(i + 1, n):
            dp = p.target.dist[p.mapping[i], p.mapping[j]]
            dq = q.target.dist[q.mapping[i], q.mapping[j]]
            if dq > dp:
                raise FactorizationError(
                    "metric kernel condition fails: q stretches a pair beyond p",
                    witness=(i, j), distances=(dq, dp))
    h = _build_factor(p, q)
    hom = _expect_hom(h, p.target, q.target, "factor map")
    assert all(hom.mapping[p.mapping[x]] == q.mapping[x] for x in range(n))
    assert hom.surjective and hom.non_expansive
    return hom


class ScaleResult(NamedTuple):
    algebra: MetricAlgebra
    projection: Homomorphism


def scale_metric(a: MetricAlgebra, c) -> ScaleResult:
    """Shrink all distances by a rational factor 0 < c <= 1; the identity
    map becomes a surjective non-expansive homomorphism onto the result.
    Infinite distances stay infinite.  Factors above 1 are rejected:
    expansion would break non-expansiveness of the identity."""
    c = Fraction(c)
    if not 0 < c <= 1:
        raise ValueError(f"scale factor must satisfy 0 < c <= 1, got {c}")
    scaled = MetricAlgebra(a.sig, a.names, a.dist.scale(c), a.ops)
    proj = _expect_hom(range(a.n), a, scaled, "scaling projection")
    return ScaleResult(scaled, proj)
