"""Free algebras over a finite class, bounded theories and variety tests.

Given a finite class K of finite metric algebras over one signature and
a finite variable set X, the free algebra is computed inside the
product of one copy of each member A per valuation v: X -> A.  The
carrier is the closure of the variable tuples (and constants) under the
pointwise operations, the metric is the restriction of the sup metric,
and each element carries a minimal-depth representative term.  Every
map from X into a member then factors uniquely through the coordinate
projections, and the distance between the images of two terms is the
maximum evaluated distance across all members and valuations.

For a class that is not closed under products and subalgebras this
object is the free algebra of the prevariety generated by K (closure of
the given class under those two constructions); callers are told so in
reports rather than the tool attempting the impossible closure check.

The bounded equational theory lists, for every pair of carrier
representatives and every term up to a depth bound, the exact free
distance; entries with infinite distance are kept but flagged, since an
equation bound must be finite.  Membership testing checks a candidate
against the finite-bound theory and either refutes it with a witness or
reports consistency up to the bound, which is deliberately not a
membership claim.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

from .errors import BoundExceeded, EvaluationError, ExtensionError
from .metric import Dist, DistMatrix, INF, format_dist
from .algebra import (Homomorphism, HomDefect, MetricAlgebra, check_homomorphism,
                      enumerate_congruences, generated_subalgebra, is_quantitative,
                      m_product, m_quotient, scale_metric, validate_algebra)
from .semantics import (MEquation, SatWitness, counterexample, eval_term,
                        first_failure, satisfies_all)
from .terms import App, Signature, Term, Var, depth as term_depth, format_term, \
    terms_up_to_depth

__all__ = [
    "ClassK",
    "FreeAlgebra",
    "free_algebra",
    "free_distance",
    "universal_extension",
    "TheoryEntry",
    "Theory",
    "equational_theory",
    "Refuted",
    "ConsistentUpTo",
    "membership_bounded",
    "ClosureViolation",
    "ClosureReport",
    "hsp_closure_suite",
    "DemoReport",
    "non_variety_demo",
]


@dataclass(frozen=True)
class ClassK:
    """A nonempty finite class of valid metric algebras over one signature."""

    members: tuple[MetricAlgebra, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("the class must be nonempty")
        sig = self.members[0].sig
        for m in self.members[1:]:
            if m.sig != sig:
                raise ValueError("all members must share one signature")
        for i, m in enumerate(self.members):
            defects = validate_algebra(m)
            if defects:
                raise ValueError(f"member {i} is not a valid metric algebra: {defects[0]}")

    @property
    def sig(self) -> Signature:
        return self.members[0].sig

    @cached_property
    def quantitative(self) -> bool:
        return all(is_quantitative(m) for m in self.members)


@dataclass
class FreeAlgebra:
    """The computed free algebra: a metric algebra whose elements are
    tuples indexed by (member, valuation) pairs, plus the generator map
    and one representative term per element."""

    class_k: ClassK
    varnames: tuple[str, ...]
    coords: tuple[tuple[int, tuple[int, ...]], ...]  # (member index, valuation)
    elements: tuple[tuple[int, ...], ...]
    base: MetricAlgebra
    generators: dict[str, int]
    reps: tuple[Term, ...]
    depths: tuple[int, ...]
    _term_cache: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.elements)

    def element_of(self, t: Term) -> int:
        """Index of the image of a term under the canonical surjection."""
        hit = self._term_cache.get(t)
        if hit is not None:
            return hit
        if isinstance(t, Var):
            try:
                idx = self.generators[t.name]
            except KeyError:
                raise EvaluationError(f"unbound variable {t.name!r}") from None
        else:
            idx = self.base.apply(t.symbol, tuple(self.element_of(c) for c in t.args))
        self._term_cache[t] = idx
        return idx


def _pointwise(members: Sequence[MetricAlgebra],
               coords: Sequence[tuple[int, tuple[int, ...]]],
               symbol: str, args: Sequence[tuple[int, ...]]) -> tuple[int, ...]:
    return tuple(
        members[m].apply(symbol, tuple(arg[c] for arg in args))
        for c, (m, _) in enumerate(coords))


def free_algebra(k: ClassK, variables: Iterable[str], *,
                 max_vars: int = 3, max_member: int = 4,
                 max_coords: int = 10_000, max_carrier: int = 100_000) -> FreeAlgebra:
    """Free algebra of (the prevariety generated by) ``k`` over the
    variable set.  Requires at least one variable or one constant."""
    varnames = tuple(sorted(set(variables)))
    if len(varnames) > max_vars:
        raise BoundExceeded("variable count", max_vars, len(varnames))
    members = k.members
    for m in members:
        if m.n > max_member:
            raise BoundExceeded("member carrier size", max_member, m.n)
    if not varnames and not k.sig.constants():
        raise ValueError("no variables and no constants: the carrier would be empty")

    nv = len(varnames)
    coords: list[tuple[int, tuple[int, ...]]] = []
    for mi, m in enumerate(members):
        count = m.n ** nv
        if len(coords) + count > max_coords:
            raise BoundExceeded("free-algebra coordinate count", max_coords,
                                len(coords) + count)
        for vals in itertools.product(range(m.n), repeat=nv):
            coords.append((mi, vals))

    # depth-layered closure of the generator tuples under pointwise operations
    known: dict[tuple[int, ...], int] = {}
    reps: list[Term] = []
    depths: list[int] = []
    elements: list[tuple[int, ...]] = []

    def add(tup: tuple[int, ...], rep: Term, d: int) -> int:
        idx = len(elements)
        if idx >= max_carrier:
            raise BoundExceeded("free-algebra carrier size", max_carrier, idx + 1)
        known[tup] = idx
        elements.append(tup)
        reps.append(rep)
        depths.append(d)
        return idx

    generators: dict[str, int] = {}
    for j, x in enumerate(varnames):
        tup = tuple(vals[j] for _, vals in coords)
        if tup in known:
            generators[x] = known[tup]
        else:
            generators[x] = add(tup, Var(x), 0)

    d = 1
    while True:
        candidates: dict[tuple[int, ...], Term] = {}
        for symbol, arity in k.sig.symbols:
            if arity == 0:
                if d == 1:
                    tup = _pointwise(members, coords, symbol, ())
                    if tup not in known:
                        t = App(symbol, ())
                        best = candidates.get(tup)
                        if best is None or format_term(t) < format_term(best):
                            candidates[tup] = t
                continue
            for combo in itertools.product(range(len(elements)), repeat=arity):
                if max(depths[i] for i in combo) != d - 1:
                    continue
                tup = _pointwise(members, coords, symbol,
                                 [elements[i] for i in combo])
                if tup in known:
                    continue
                t = App(symbol, tuple(reps[i] for i in combo))
                best = candidates.get(tup)
                if best is None or format_term(t) < format_term(best):
                    candidates[tup] = t
        if not candidates:
            break
        for tup, t in sorted(candidates.items(), key=lambda kv: format_term(kv[1])):
            add(tup, t, d)
        d += 1

    size = len(elements)
    member_dists = [m.dist for m in members]
    rows = []
    zero = Fraction(0)
    for x in elements:
        row = []
        for y in elements:
            dd = zero
            for c, (mi, _) in enumerate(coords):
                e = member_dists[mi][x[c], y[c]]
                if e > dd:
                    dd = e
            row.append(dd)
        rows.append(tuple(row))
    dist = DistMatrix(tuple(rows))

    tables = {}
    for symbol, arity in k.sig.symbols:
        table = []
        for combo in itertools.product(range(size), repeat=arity):
            tup = _pointwise(members, coords, symbol, [elements[i] for i in combo])
            table.append(known[tup])
        tables[symbol] = table
    names = tuple(format_term(t) for t in reps)
    base = MetricAlgebra.make(k.sig, names, dist, tables)
    return FreeAlgebra(k, varnames, tuple(coords), tuple(elements), base,
                       generators, tuple(reps), tuple(depths))


def free_distance(f: FreeAlgebra, s: Term, t: Term) -> Dist:
    """Distance between the images of two terms in the free algebra;
    equals the maximum of d(eval s, eval t) over all members and
    valuations."""
    return f.base.dist[f.element_of(s), f.element_of(t)]


def universal_extension(f: FreeAlgebra, a: MetricAlgebra,
                        valuation: Mapping[str, int]) -> Homomorphism:
    """The unique non-expansive homomorphism h out of the free algebra
    with h(image of x) = valuation(x), built by evaluating the
    representative terms and verified before returning.

    Raises ExtensionError when well-definedness, operation preservation
    or non-expansiveness fails; such a failure certifies that ``a`` does
    not lie in the prevariety generated by the class (otherwise the map
    would exist)."""
    if a.sig != f.class_k.sig:
        raise ValueError("target algebra has a different signature")
    for x in f.varnames:
        if x not in valuation:
            raise ValueError(f"valuation does not cover variable {x!r}")
    mapping = tuple(eval_term(a, dict(valuation), rep) for rep in f.reps)
    for x in f.varnames:
        if mapping[f.generators[x]] != valuation[x]:
            raise ExtensionError(
                f"not well-defined: the free algebra identifies {x!r} with "
                f"{format_term(f.reps[f.generators[x]])!r} but the valuation separates them")
    h = check_homomorphism(mapping, f.base, a)
    if isinstance(h, HomDefect):
        raise ExtensionError(f"no homomorphic extension: {h.describe()}")
    if not h.non_expansive:
        for i in range(f.size):
            for j in range(i + 1, f.size):
                if a.dist[mapping[i], mapping[j]] > f.base.dist[i, j]:
                    raise ExtensionError(
                        "extension is not non-expansive: "
                        f"d({format_term(f.reps[i])}, {format_term(f.reps[j])}) is "
                        f"{format_dist(f.base.dist[i, j])} upstairs but "
                        f"{format_dist(a.dist[mapping[i], mapping[j]])} downstairs")
        raise ExtensionError("extension is not non-expansive")
    return h


@dataclass(frozen=True)
class TheoryEntry:
    """One pair of terms with its exact free distance."""

    lhs: Term
    rhs: Term
    eps: Dist

    @property
    def equational(self) -> bool:
        """Only finite bounds are admissible in an equation."""
        return self.eps != INF

    def line(self) -> str:
        text = f"{format_term(self.lhs)} ={format_dist(self.eps)} {format_term(self.rhs)}"
        return text if self.equational else f"# {text}"

    def sort_key(self):
        return (max(term_depth(self.lhs), term_depth(self.rhs)),
                format_term(self.lhs), format_term(self.rhs))


@dataclass(frozen=True)
class Theory:
    vars: tuple[str, ...]
    depth: int
    entries: tuple[TheoryEntry, ...]

    def lines(self) -> list[str]:
        return [e.line() for e in self.entries]

    def equations(self) -> list[MEquation]:
        varset = frozenset(self.vars)
        return [MEquation(varset, e.lhs, e.rhs, e.eps)
                for e in self.entries if e.equational]


def equational_theory(k: ClassK, variables: Iterable[str], depth: int, *,
                      max_depth: int = 4, max_terms: int = 100_000,
                      **free_bounds) -> Theory:
    """The bounded theory of the class: free distances between all
    carrier representatives, plus a rewrite entry (term, canonical
    representative) for every term up to the depth bound.  Entries are
    sorted by (depth, text) so the shallowest consequences come first."""
    if depth < 1:
        raise ValueError("depth must be positive")
    if depth > max_depth:
        raise BoundExceeded("theory depth", max_depth, depth)
    f = free_algebra(k, variables, **free_bounds)
    entries: dict[tuple[Term, Term], TheoryEntry] = {}

    def keyed(s: Term, t: Term) -> tuple[Term, Term]:
        return (s, t) if format_term(s) <= format_term(t) else (t, s)

    for i in range(f.size):
        for j in range(i + 1, f.size):
            s, t = keyed(f.reps[i], f.reps[j])
            entries[(s, t)] = TheoryEntry(s, t, f.base.dist[i, j])
    for t in terms_up_to_depth(k.sig, f.varnames, depth, max_terms=max_terms):
        rep = f.reps[f.element_of(t)]
        if t == rep:
            continue
        s1, s2 = keyed(t, rep)
        if (s1, s2) not in entries:
            entries[(s1, s2)] = TheoryEntry(s1, s2, Fraction(0))
    ordered = sorted(entries.values(), key=TheoryEntry.sort_key)
    return Theory(f.varnames, depth, tuple(ordered))


@dataclass(frozen=True)
class Refuted:
    """A candidate violates an equation that holds across the class."""

    entry: TheoryEntry
    equation: MEquation
    witness: SatWitness

    def line(self, candidate: MetricAlgebra) -> str:
        return (f"refuted by {self.equation.render()}: valuation "
                f"{self.witness.valuation.render(candidate)} gives distance "
                f"{format_dist(self.witness.distance)}")


@dataclass(frozen=True)
class ConsistentUpTo:
    """No violation found; explicitly bounded, not a membership proof."""

    depth: int

    def line(self) -> str:
        return (f"consistent with the class theory up to depth {self.depth} "
                f"(bounded check, not a membership proof)")


def membership_bounded(k: ClassK, candidate: MetricAlgebra,
                       variables: Iterable[str], depth: int,
                       *, max_valuations: int = 10 ** 6,
                       **theory_bounds) -> Union[Refuted, ConsistentUpTo]:
    """Check a candidate against the bounded theory of the class.  A
    refutation is conclusive (the candidate is outside the variety
    generated by the class); consistency is only up to the bound."""
    if candidate.sig != k.sig:
        raise ValueError("candidate has a different signature")
    theory = equational_theory(k, variables, depth, **theory_bounds)
    varset = frozenset(theory.vars)
    for entry in theory.entries:
        if not entry.equational:
            continue
        eq = MEquation(varset, entry.lhs, entry.rhs, entry.eps)
        w = counterexample(candidate, eq, max_valuations)
        if w is not None:
            return Refuted(entry, eq, w)
    return ConsistentUpTo(depth)


@dataclass(frozen=True)
class ClosureViolation:
    construction: str
    detail: str
    equation: MEquation
    witness_text: str


@dataclass(frozen=True)
class ClosureReport:
    """Outcome of rebuilding models by products, generated subalgebras
    and canonical quotients, then rechecking the theory on every result.
    Any violation indicates an implementation bug: satisfaction is
    preserved by all three constructions."""

    model_count: int
    non_model_count: int
    product_count: int
    subalgebra_count: int
    quotient_count: int
    violations: tuple[ClosureViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        out = [
            f"models: {self.model_count} of {self.model_count + self.non_model_count} pool algebras",
            f"products checked: {self.product_count}",
            f"generated subalgebras checked: {self.subalgebra_count}",
            f"canonical quotients checked: {self.quotient_count}",
            f"violations: {len(self.violations)}",
        ]
        for v in self.violations:
            out.append(f"  VIOLATION in {v.construction} ({v.detail}): "
                       f"{v.equation.render()} fails, {v.witness_text}")
        return out

    def to_json_dict(self) -> dict:
        return {
            "models": self.model_count,
            "non_models": self.non_model_count,
            "products": self.product_count,
            "subalgebras": self.subalgebra_count,
            "quotients": self.quotient_count,
            "violations": [
                {"construction": v.construction, "detail": v.detail,
                 "equation": v.equation.render(), "witness": v.witness_text}
                for v in self.violations],
            "ok": self.ok,
        }


def hsp_closure_suite(theory: Sequence[MEquation], pool: Sequence[MetricAlgebra],
                      *, max_product_size: int = 10 ** 6,
                      max_congruence_size: int = 6,
                      max_valuations: int = 10 ** 6) -> ClosureReport:
    """Filter the pool down to models of the theory, rebuild them by
    pairwise products, all generated subalgebras and all canonical
    congruence quotients, and recheck the theory on every construction."""
    sig = pool[0].sig if pool else None
    for a in pool:
        if a.sig != sig:
            raise ValueError("pool algebras have different signatures")
    models = [a for a in pool if satisfies_all(a, theory, max_valuations)]
    violations: list[ClosureViolation] = []
    counts = {"product": 0, "subalgebra": 0, "quotient": 0}

    def check(kind: str, detail: str, algebra: MetricAlgebra):
        counts[kind] += 1
        hit = first_failure(algebra, theory, max_valuations)
        if hit is not None:
            eq, w = hit
            violations.append(ClosureViolation(
                kind, detail, eq,
                f"valuation {w.valuation.render(algebra)} gives distance "
                f"{format_dist(w.distance)}"))

    for i in range(len(models)):
        for j in range(i, len(models)):
            prod, _ = m_product([models[i], models[j]], max_size=max_product_size)
            check("product", f"models {i} x {j}", prod)
    for i, a in enumerate(models):
        seen: set[frozenset[int]] = set()
        for r in range(1, a.n + 1):
            for gens in itertools.combinations(range(a.n), r):
                result = generated_subalgebra(a, gens)
                key = frozenset(result.embedding.mapping)
                if key in seen:
                    continue
                seen.add(key)
                check("subalgebra", f"model {i}, generators {list(gens)}",
                      result.algebra)
    for i, a in enumerate(models):
        for p in enumerate_congruences(a, max_size=max_congruence_size):
            q = m_quotient(a, p)
            check("quotient", f"model {i}, blocks {list(p.blocks)}", q.algebra)
    return ClosureReport(len(models), len(pool) - len(models),
                         counts["product"], counts["subalgebra"],
                         counts["quotient"], tuple(violations))


def _min_distinct_distance(a: MetricAlgebra) -> Dist:
    return min((a.dist[i, j] for i in range(a.n) for j in range(i + 1, a.n)),
               default=INF)


@dataclass(frozen=True)
class DemoReport:
    """The distance-lower-bound property is not equational: it survives
    no scaling quotient."""

    scale: Fraction
    base: MetricAlgebra
    quotient: MetricAlgebra
    min_before: Dist
    min_after: Dist
    property_before: bool
    property_after: bool
    projection: Homomorphism
    base_quantitative: bool
    quotient_quantitative: bool

    def lines(self) -> list[str]:
        out = [
            "base algebra: two-point xor algebra, "
            f"min distance between distinct points = {format_dist(self.min_before)}",
            f"quantitative: {self.base_quantitative}",
            f"scaling the metric by {self.scale} gives a metric algebra with "
            f"min distinct distance = {format_dist(self.min_after)}",
            f"the identity map onto the scaled algebra is a surjective "
            f"homomorphism (non-expansive: {self.projection.non_expansive}), "
            f"so the scaled algebra is a quotient in the metric sense",
            f"scaled algebra quantitative: {self.quotient_quantitative}",
            f"property 'all distinct points at distance >= 1': "
            f"holds in the base: {self.property_before}; "
            f"holds in the quotient: {self.property_after}",
        ]
        if self.property_before and not self.property_after:
            out += [
                "a distance lower bound is therefore not preserved by metric "
                "quotients, so no set of equations (which only impose upper "
                "bounds, preserved by non-expansive surjections) can define a "
                "class by such a property",
                "infinite-carrier analog: re-metrize the reals with "
                "d(x, y) = |tanh(x) - tanh(y)|; the identity is again a "
                "distance-shrinking quotient, which is why normed vector "
                "spaces cannot be carved out by equations alone",
            ]
        else:
            out.append("degenerate run: the scaling preserved the lower bound")
        return out

    def to_json_dict(self) -> dict:
        return {
            "scale": str(self.scale),
            "min_before": format_dist(self.min_before),
            "min_after": format_dist(self.min_after),
            "property_before": self.property_before,
            "property_after": self.property_after,
            "projection_non_expansive": self.projection.non_expansive,
            "projection_surjective": self.projection.surjective,
            "base_quantitative": self.base_quantitative,
            "quotient_quantitative": self.quotient_quantitative,
        }


def non_variety_demo(scale=Fraction(1, 2)) -> DemoReport:
    """Scale the two-point xor algebra and watch the distance lower
    bound die while every equational property survives."""
    sig = Signature.make({"xor": 2})
    base = MetricAlgebra.make(
        sig, ["0", "1"], [[0, 1], [1, 0]], {"xor": [[0, 1], [1, 0]]})
    scaled, proj = scale_metric(base, scale)
    min_before = _min_distinct_distance(base)
    min_after = _min_distinct_distance(scaled)
    one = Fraction(1)
    return DemoReport(
        scale=Fraction(scale),
        base=base,
        quotient=scaled,
        min_before=min_before,
        min_after=min_after,
        property_before=min_before >= one,
        property_after=min_after >= one,
        projection=proj,
        base_quantitative=is_quantitative(base),
        quotient_quantitative=is_quantitative(scaled),
    )
