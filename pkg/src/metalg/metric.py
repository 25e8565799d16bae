"""Exact extended metrics on finite point sets.

Distances are nonnegative ``fractions.Fraction`` values plus the single
float infinity ``INF``.  Every construction below uses only min, max,
addition and comparison, all of which are exact on this mix (addition
saturates at infinity), so there are no rounding or tolerance questions
anywhere in the package.

Hot scans (axiom check, shortest-path closure) run on the selected
kernel backend when the matrix encodes safely into int64 by scaling
with the common denominator; otherwise the pure twin computes directly
on the exact values.
"""

from __future__ import annotations

import itertools
import math
from array import array
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_EVEN
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from . import _kernels
from .errors import ParseError

__all__ = [
    "INF",
    "Dist",
    "as_dist",
    "parse_dist",
    "format_dist",
    "dist_to_json",
    "dist_from_json",
    "MetricViolation",
    "check_metric_axioms",
    "DistMatrix",
    "sup_product",
    "discrete_metric",
    "Partition",
    "all_partitions",
    "quotient_metric",
]

INF = math.inf

Dist = Union[Fraction, float]  # the only float ever admitted is INF


def as_dist(value) -> Dist:
    """Coerce to an exact distance: Fraction, int, a literal string
    ("3/2", "1.5", "inf") or INF itself."""
    if value == INF:
        return INF
    if isinstance(value, float):
        raise ValueError("finite distances must be exact (Fraction, int or string)")
    if isinstance(value, str):
        try:
            return parse_dist(value)
        except ParseError as exc:
            raise ValueError(str(exc)) from None
    d = Fraction(value)
    if d < 0:
        raise ValueError(f"distances must be nonnegative, got {d}")
    return d


def parse_dist(text: str) -> Dist:
    """Parse a distance literal: decimal ("1.5"), fraction ("3/2") or "inf".

    Decimals convert exactly to rationals."""
    text = text.strip()
    if text == "inf":
        return INF
    try:
        d = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad distance literal {text!r}: {exc}") from None
    if d < 0:
        raise ParseError(f"distance literal must be nonnegative, got {text!r}")
    return d


def format_dist(d: Dist) -> str:
    """Exact text: "inf", "3/2", "1"."""
    return "inf" if d == INF else str(d)


def dist_to_decimal(d: Dist, digits: int) -> str:
    """A rounded decimal rendering with ``digits`` fractional digits."""
    if d == INF:
        return "inf"
    q = Decimal(1).scaleb(-digits) if digits > 0 else Decimal(1)
    return str((Decimal(d.numerator) / Decimal(d.denominator)).quantize(
        q, rounding=ROUND_HALF_EVEN))


def dist_to_json(d: Dist) -> str:
    return format_dist(d)


def dist_from_json(value) -> Dist:
    """Accept a JSON int or a literal string; floats are rejected because
    they are not exact."""
    if isinstance(value, bool):
        raise ParseError(f"bad distance value {value!r}")
    if isinstance(value, int):
        if value < 0:
            raise ParseError(f"distance must be nonnegative, got {value}")
        return Fraction(value)
    if isinstance(value, str):
        return parse_dist(value)
    if isinstance(value, float):
        raise ParseError(
            f"distance {value!r} is a float; write it as a string literal "
            f"(\"3/2\", \"1.5\", \"inf\") to keep arithmetic exact")
    raise ParseError(f"bad distance value {value!r}")


# --- kernel encodings ------------------------------------------------------

_INT64_INF = 1 << 61
_MAX_SCALED = 1 << 60


def _scaled_ints(flat: Sequence[Dist]):
    """Encode exact distances as scaled int64 with a saturating infinity
    sentinel; None when the scale would not fit safely."""
    dens = [v.denominator for v in flat if v != INF]
    lcm = 1
    for den in dens:
        lcm = lcm * den // math.gcd(lcm, den)
        if lcm > _MAX_SCALED:
            return None
    scaled = []
    for v in flat:
        if v == INF:
            scaled.append(_INT64_INF)
        else:
            s = v.numerator * (lcm // v.denominator)
            if s > _MAX_SCALED:
                return None
            scaled.append(s)
    return array("q", scaled), lcm


def _violation_scan(n: int, flat: list[Dist]):
    if _kernels.compiled is not None:
        enc = _scaled_ints(flat)
        if enc is not None:
            return _kernels.compiled.metric_violation(n, enc[0])
    return _kernels.pure.metric_violation(n, flat)


def _closure(n: int, flat: list[Dist]) -> list[Dist]:
    if _kernels.compiled is not None:
        enc = _scaled_ints(flat)
        if enc is not None:
            ints, lcm = enc
            closed = _kernels.compiled.metric_closure(n, ints)
            return [INF if v >= _INT64_INF else Fraction(v, lcm) for v in closed]
    return _kernels.pure.metric_closure(n, flat)


# --- metric axioms ---------------------------------------------------------

_KINDS = {
    1: "zero-diagonal",
    2: "symmetry",
    3: "identity-of-indiscernibles",
    4: "triangle",
}


@dataclass(frozen=True)
class MetricViolation:
    kind: str
    witness: tuple[int, ...]

    def describe(self) -> str:
        if self.kind == "zero-diagonal":
            return f"d({self.witness[0]},{self.witness[0]}) is not 0"
        if self.kind == "symmetry":
            i, j = self.witness
            return f"d({i},{j}) differs from d({j},{i})"
        if self.kind == "identity-of-indiscernibles":
            i, j = self.witness
            return f"d({i},{j}) = 0 for distinct points {i}, {j}"
        i, k, j = self.witness
        return f"d({i},{k}) > d({i},{j}) + d({j},{k})"


def _validated_rows(rows) -> tuple[tuple[Dist, ...], ...]:
    entries = tuple(tuple(r) for r in rows)
    n = len(entries)
    for r in entries:
        if len(r) != n:
            raise ValueError(f"matrix is not square: {n} rows, a row of length {len(r)}")
    for r in entries:
        for v in r:
            if v == INF:
                continue
            if not isinstance(v, Fraction):
                raise ValueError(f"entry {v!r} is not an exact distance; use as_dist")
            if v < 0:
                raise ValueError(f"negative entry {v}")
    return entries


def check_metric_axioms(rows) -> MetricViolation | None:
    """Check the four extended-metric axiom families on a candidate
    square matrix; returns the first violation in a fixed scan order
    (diagonal, symmetry, separation, triangle) or None.

    The triangle witness (i, k, j) means d(i,k) > d(i,j) + d(j,k)."""
    entries = _validated_rows(rows)
    n = len(entries)
    flat = [v for r in entries for v in r]
    hit = _violation_scan(n, flat)
    if hit is None:
        return None
    code, a, b, c = hit
    kind = _KINDS[code]
    if code == 1:
        return MetricViolation(kind, (a,))
    if code in (2, 3):
        return MetricViolation(kind, (a, b))
    return MetricViolation(kind, (a, b, c))


@dataclass(frozen=True)
class DistMatrix:
    """Immutable n x n matrix of exact extended distances.

    Construction validates shape and entry kinds only; ``checked``
    additionally enforces the metric axioms.  Internal constructions
    (sup products, quotient closures) produce matrices that satisfy the
    axioms by the mathematics of the construction."""

    entries: tuple[tuple[Dist, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", _validated_rows(self.entries))
        if not self.entries:
            raise ValueError("empty carriers are not allowed")

    @classmethod
    def checked(cls, rows) -> "DistMatrix":
        m = cls(tuple(tuple(r) for r in rows))
        v = check_metric_axioms(m.entries)
        if v is not None:
            raise ValueError(f"not a metric: {v.describe()}")
        return m

    @classmethod
    def from_literals(cls, rows: Iterable[Iterable]) -> "DistMatrix":
        return cls(tuple(tuple(as_dist(v) for v in r) for r in rows))

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> Dist:
        i, j = ij
        return self.entries[i][j]

    def flat(self) -> list[Dist]:
        return [v for r in self.entries for v in r]

    def realized(self) -> tuple[Dist, ...]:
        """Sorted distinct distances occurring in the matrix."""
        return tuple(sorted(set(self.flat())))

    def ranks(self) -> tuple[array, tuple[Dist, ...]]:
        """Order-rank encoding: flat int ranks plus the sorted value table."""
        values = self.realized()
        index = {v: i for i, v in enumerate(values)}
        return array("q", [index[v] for r in self.entries for v in r]), values

    def scale(self, c: Fraction) -> "DistMatrix":
        """Pointwise multiple by a positive rational; INF stays INF."""
        c = Fraction(c)
        if c <= 0:
            raise ValueError("scale factor must be positive")
        return DistMatrix(tuple(
            tuple(INF if v == INF else c * v for v in r) for r in self.entries))


def sup_product(ms: Sequence[DistMatrix]) -> DistMatrix:
    """Product carrier (tuples in lexicographic order) with the pointwise
    maximum distance; the empty product is the one-point space."""
    sizes = [m.n for m in ms]
    tuples = list(itertools.product(*(range(s) for s in sizes)))
    rows = []
    zero = Fraction(0)
    for x in tuples:
        row = []
        for y in tuples:
            d = zero
            for m, xi, yi in zip(ms, x, y):
                e = m.entries[xi][yi]
                if e > d:
                    d = e
            row.append(d)
        rows.append(tuple(row))
    return DistMatrix(tuple(rows))


def discrete_metric(n: int) -> DistMatrix:
    """Distinct points at infinite distance."""
    if n < 1:
        raise ValueError("carrier must have at least one point")
    zero = Fraction(0)
    return DistMatrix(tuple(
        tuple(zero if i == j else INF for j in range(n)) for i in range(n)))


# --- partitions ------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty blocks covering 0..n-1, in canonical order
    (each block sorted, blocks sorted by least element)."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        canon = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        object.__setattr__(self, "blocks", canon)
        seen: set[int] = set()
        for b in canon:
            if not b:
                raise ValueError("empty block")
            for x in b:
                if not isinstance(x, int) or x < 0:
                    raise ValueError(f"bad element {x!r}")
                if x in seen:
                    raise ValueError(f"element {x} occurs in two blocks")
                seen.add(x)
        if seen != set(range(len(seen))):
            raise ValueError("blocks must cover 0..n-1 without gaps")
        index = [0] * len(seen)
        for bi, b in enumerate(canon):
            for x in b:
                index[x] = bi
        object.__setattr__(self, "_index", tuple(index))

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "Partition":
        return cls(tuple(tuple(b) for b in blocks))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple((i,) for i in range(n)))

    @classmethod
    def single_block(cls, n: int) -> "Partition":
        return cls((tuple(range(n)),))

    @property
    def n(self) -> int:
        return len(self._index)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def block_of(self, i: int) -> int:
        return self._index[i]


def all_partitions(n: int) -> Iterator[Partition]:
    """All partitions of 0..n-1, one per restricted growth string, in
    RGS lexicographic order (the single block comes first, the
    singleton partition last)."""
    if n == 0:
        return
    rgs = [0] * n

    def emit():
        nblocks = max(rgs) + 1
        blocks: list[list[int]] = [[] for _ in range(nblocks)]
        for i, b in enumerate(rgs):
            blocks[b].append(i)
        return Partition.from_blocks(blocks)

    def rec(i: int, mx: int):
        if i == n:
            yield emit()
            return
        for b in range(mx + 2):
            rgs[i] = b
            yield from rec(i + 1, max(mx, b))

    yield from rec(1, 0)


def quotient_metric(m: DistMatrix, p: Partition) -> DistMatrix:
    """The greatest metric on the blocks making the projection
    non-expansive: least cross-block distance per block pair, then
    shortest-path closure.

    Over a true finite metric every cross-block minimum is positive, so
    the closure is automatically separated; this is asserted rather than
    error-handled."""
    if p.n != m.n:
        raise ValueError(f"partition of {p.n} points against a metric on {m.n}")
    b = p.num_blocks
    zero = Fraction(0)
    w: list[Dist] = [zero if u == v else INF for u in range(b) for v in range(b)]
    for i in range(m.n):
        bi = p.block_of(i)
        row = m.entries[i]
        for j in range(m.n):
            bj = p.block_of(j)
            if bi == bj:
                continue
            if row[j] < w[bi * b + bj]:
                w[bi * b + bj] = row[j]
    closed = _closure(b, w)
    rows = tuple(tuple(closed[u * b + v] for v in range(b)) for u in range(b))
    out = DistMatrix(rows)
    bad = check_metric_axioms(rows)
    assert bad is None, f"quotient closure broke the axioms: {bad.describe()}"
    return out
