"""Command-line front end.

Exit codes: 0 success / property holds, 1 property fails or membership
refuted (the witness is printed), 2 input error (malformed file, bad
flag, bound overrun; the offending bound or location is named).

``--json PATH`` writes a machine-readable twin of the report next to
the human-readable output.  All numbers print as exact fractions;
``--decimal K`` adds a K-digit decimal rendering alongside, never
replacing the fraction.  A ``-`` in place of a file path reads stdin.

There is no randomness anywhere: every verb is deterministic.  The
``--seed`` flag exists only to fail loudly and document that fact.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .errors import (BoundExceeded, EvaluationError, ExtensionError,
                     FactorizationError, NotACongruence, ParseError)
from .metric import Dist, INF, Partition, dist_to_decimal, format_dist, parse_dist
from .algebra import (HomDefect, Homomorphism, MetricAlgebra, check_homomorphism,
                      enumerate_congruences, factor_homomorphism,
                      factor_m_homomorphism, generated_subalgebra, m_product,
                      m_quotient, quantitative_witness, scale_metric,
                      validate_algebra)
from .semantics import first_failure, parse_equations
from .free import (ClassK, Refuted, equational_theory, free_algebra,
                   hsp_closure_suite, membership_bounded, non_variety_demo)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _load_algebra(path: str) -> MetricAlgebra:
    text = _read(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from None
    try:
        return MetricAlgebra.from_json_dict(data)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _load_homomorphism(path: str) -> Homomorphism:
    """Homomorphism file: {"source": <algebra>, "target": <algebra>,
    "map": [target element name per source element]}."""
    text = _read(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from None
    if not isinstance(data, dict) or not {"source", "target", "map"} <= set(data):
        raise ParseError(f"{path}: expected fields source, target, map")
    source = MetricAlgebra.from_json_dict(data["source"])
    target = MetricAlgebra.from_json_dict(data["target"])
    raw = data["map"]
    if not isinstance(raw, list) or len(raw) != source.n:
        raise ParseError(f"{path}: map must list one target element per source element")
    try:
        mapping = [target.element(str(x)) for x in raw]
    except KeyError as exc:
        raise ParseError(f"{path}: {exc.args[0]}") from None
    h = check_homomorphism(mapping, source, target)
    if isinstance(h, HomDefect):
        raise ParseError(f"{path}: not a homomorphism: {h.describe()}")
    return h


class _Reporter:
    def __init__(self, decimal: int | None):
        self.decimal = decimal

    def dist(self, d: Dist) -> str:
        text = format_dist(d)
        if self.decimal is not None and d != INF:
            text += f" ({dist_to_decimal(d, self.decimal)})"
        return text


def _parse_names(a: MetricAlgebra, csv: str) -> list[int]:
    out = []
    for chunk in csv.split(","):
        name = chunk.strip()
        if not name:
            continue
        try:
            out.append(a.element(name))
        except KeyError:
            raise ParseError(f"no carrier element named {name!r}") from None
    return out


def _parse_blocks(a: MetricAlgebra, text: str) -> Partition:
    blocks = []
    for chunk in text.split("|"):
        names = chunk.split()
        if not names:
            raise ParseError("empty block in --blocks")
        try:
            blocks.append([a.element(x) for x in names])
        except KeyError as exc:
            raise ParseError(str(exc.args[0])) from None
    try:
        return Partition.from_blocks(blocks)
    except ValueError as exc:
        raise ParseError(f"bad --blocks: {exc}") from None


def _algebra_summary(a: MetricAlgebra, r: _Reporter) -> list[str]:
    lines = [f"carrier ({a.n}): {', '.join(a.names)}"]
    for i in range(a.n):
        row = " ".join(r.dist(a.dist[i, j]) for j in range(a.n))
        lines.append(f"  d[{a.names[i]}] = {row}")
    return lines


# --- verb handlers ---------------------------------------------------------

def _cmd_validate(args, r):
    a = _load_algebra(args.algebra)
    defects = validate_algebra(a)
    payload = {"verb": "validate", "input": args.algebra, "valid": not defects,
               "defects": defects}
    if defects:
        return 1, ["invalid:"] + [f"  {d}" for d in defects], payload
    return 0, ["valid"], payload


def _cmd_quantitative(args, r):
    a = _load_algebra(args.algebra)
    w = quantitative_witness(a)
    payload = {"verb": "quantitative", "input": args.algebra,
               "quantitative": w is None}
    if w is None:
        return 0, ["quantitative: every operation is non-expansive"], payload
    payload["witness"] = {
        "symbol": w.symbol,
        "left": [a.names[i] for i in w.left],
        "right": [a.names[i] for i in w.right],
        "output_distance": format_dist(w.output_distance),
        "input_distance": format_dist(w.input_distance),
    }
    return 1, [f"not quantitative: {w.describe()}"], payload


def _cmd_sat(args, r):
    a = _load_algebra(args.algebra)
    eqs = parse_equations(a.sig, _read(args.equations))
    hit = first_failure(a, eqs, max_valuations=args.max_valuations)
    payload = {"verb": "sat", "algebra": args.algebra, "equations": args.equations,
               "count": len(eqs), "satisfied": hit is None}
    if hit is None:
        return 0, [f"all {len(eqs)} equation(s) hold"], payload
    eq, w = hit
    payload["failure"] = {
        "equation": eq.render(),
        "valuation": {x: a.names[v] for x, v in w.valuation.as_dict().items()},
        "distance": format_dist(w.distance),
    }
    return 1, [
        f"FAILS: {eq.render()}",
        f"  witness valuation: {w.valuation.render(a)}",
        f"  distance: {r.dist(w.distance)}",
    ], payload


def _cmd_product(args, r):
    algebras = [_load_algebra(p) for p in args.algebras]
    prod, projections = m_product(algebras, max_size=args.max_size)
    payload = {"verb": "product", "inputs": list(args.algebras),
               "algebra": prod.to_json_dict(),
               "projections": [list(h.mapping) for h in projections]}
    lines = [f"product of {len(algebras)} algebra(s)"] + _algebra_summary(prod, r)
    return 0, lines, payload


def _cmd_subalg(args, r):
    a = _load_algebra(args.algebra)
    gens = _parse_names(a, args.gens)
    sub, embedding = generated_subalgebra(a, gens)
    payload = {"verb": "subalg", "input": args.algebra,
               "generators": [a.names[g] for g in gens],
               "algebra": sub.to_json_dict(),
               "embedding": [a.names[i] for i in embedding.mapping]}
    lines = [f"generated subalgebra has {sub.n} element(s): {', '.join(sub.names)}"]
    lines += _algebra_summary(sub, r)
    return 0, lines, payload


def _cmd_congruences(args, r):
    a = _load_algebra(args.algebra)
    congs = enumerate_congruences(a, max_size=args.max_size)
    rendered = [" | ".join(" ".join(a.names[i] for i in b) for b in p.blocks)
                for p in congs]
    payload = {"verb": "congruences", "input": args.algebra,
               "count": len(congs), "congruences": rendered}
    return 0, [f"{len(congs)} congruence(s):"] + [f"  {t}" for t in rendered], payload


def _cmd_quotient(args, r):
    a = _load_algebra(args.algebra)
    p = _parse_blocks(a, args.blocks)
    q = m_quotient(a, p)
    payload = {"verb": "quotient", "input": args.algebra,
               "blocks": [[a.names[i] for i in b] for b in p.blocks],
               "algebra": q.algebra.to_json_dict(),
               "projection": [q.algebra.names[q.projection(i)] for i in range(a.n)],
               "quantitative_preserved": q.quantitative_preserved}
    lines = [f"quotient has {q.algebra.n} block(s)"] + _algebra_summary(q.algebra, r)
    if q.quantitative_preserved is not None:
        lines.append(
            "source is quantitative; canonical quotient metric "
            + ("preserves" if q.quantitative_preserved else "does NOT preserve")
            + " quantitativity here")
    return 0, lines, payload


def _cmd_factor(args, r):
    p = _load_homomorphism(args.p)
    q = _load_homomorphism(args.q)
    h = factor_m_homomorphism(p, q) if args.metric else factor_homomorphism(p, q)
    payload = {"verb": "factor", "metric": bool(args.metric),
               "p": args.p, "q": args.q,
               "h": [q.target.names[x] for x in h.mapping],
               "non_expansive": h.non_expansive, "surjective": h.surjective}
    lines = [
        "factored: h . p = q with h = ["
        + ", ".join(f"{p.target.names[i]} -> {q.target.names[h(i)]}"
                    for i in range(p.target.n)) + "]",
        f"h surjective: {h.surjective}, non-expansive: {h.non_expansive}",
    ]
    return 0, lines, payload


def _cmd_scale(args, r):
    a = _load_algebra(args.algebra)
    factor = parse_dist(args.by)
    if factor == INF:
        raise ParseError("--by must be a finite positive rational <= 1")
    try:
        scaled, proj = scale_metric(a, factor)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    payload = {"verb": "scale", "input": args.algebra, "by": str(factor),
               "algebra": scaled.to_json_dict(),
               "projection_non_expansive": proj.non_expansive}
    lines = [f"scaled all distances by {factor}"] + _algebra_summary(scaled, r)
    return 0, lines, payload


def _free_class(paths) -> tuple[ClassK, list[MetricAlgebra]]:
    members = [_load_algebra(p) for p in paths]
    return ClassK(tuple(members)), members


def _cmd_free(args, r):
    k, _ = _free_class(args.algebras)
    variables = [v.strip() for v in args.vars.split(",") if v.strip()]
    f = free_algebra(k, variables, max_carrier=args.max_size)
    payload = {"verb": "free", "inputs": list(args.algebras),
               "vars": sorted(variables),
               "size": f.size,
               "generators": {x: f.base.names[i] for x, i in f.generators.items()},
               "representatives": list(f.base.names),
               "algebra": f.base.to_json_dict(),
               "note": "free algebra of the prevariety generated by the inputs "
                       "(closure of the class under products and subalgebras is "
                       "assumed, not checked)"}
    lines = [
        f"free algebra over {{{', '.join(f.varnames)}}} has {f.size} element(s)",
        "representatives: " + ", ".join(f.base.names),
    ]
    lines += _algebra_summary(f.base, r)
    lines.append("note: computed in the prevariety generated by the inputs; "
                 "closure of the class itself is not checked")
    return 0, lines, payload


def _cmd_theory(args, r):
    k, _ = _free_class(args.algebras)
    variables = [v.strip() for v in args.vars.split(",") if v.strip()]
    theory = equational_theory(k, variables, args.depth,
                               max_depth=args.max_depth)
    payload = {"verb": "theory", "inputs": list(args.algebras),
               "vars": list(theory.vars), "depth": theory.depth,
               "entries": theory.lines()}
    return 0, theory.lines(), payload


def _cmd_member(args, r):
    k, _ = _free_class(args.algebras)
    candidate = _load_algebra(args.candidate)
    variables = [v.strip() for v in args.vars.split(",") if v.strip()]
    verdict = membership_bounded(k, candidate, variables, args.depth,
                                 max_depth=args.max_depth)
    if isinstance(verdict, Refuted):
        payload = {"verb": "member", "inputs": list(args.algebras),
                   "candidate": args.candidate, "depth": args.depth,
                   "refuted": True,
                   "equation": verdict.equation.render(),
                   "valuation": {x: candidate.names[v] for x, v
                                 in verdict.witness.valuation.as_dict().items()},
                   "distance": format_dist(verdict.witness.distance)}
        return 1, [verdict.equation.render(),
                   verdict.line(candidate)], payload
    payload = {"verb": "member", "inputs": list(args.algebras),
               "candidate": args.candidate, "depth": args.depth,
               "refuted": False}
    return 0, [verdict.line()], payload


def _cmd_hsp(args, r):
    pool = [_load_algebra(p) for p in args.algebras]
    eqs = parse_equations(pool[0].sig, _read(args.equations))
    report = hsp_closure_suite(eqs, pool, max_product_size=args.max_size)
    payload = {"verb": "hsp", "equations": args.equations,
               "pool": list(args.algebras), **report.to_json_dict()}
    return (0 if report.ok else 1), report.lines(), payload


def _cmd_demo(args, r):
    factor = parse_dist(args.scale)
    if factor == INF or not 0 < factor <= 1:
        raise ParseError("--scale must be a rational in (0, 1]")
    report = non_variety_demo(Fraction(factor))
    payload = {"verb": "demo-nonvariety", **report.to_json_dict()}
    return 0, report.lines(), payload


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metalg",
        description="workbench for finite metric algebras (exact arithmetic)")
    parser.add_argument("--json", metavar="PATH",
                        help="also write a machine-readable report to PATH")
    parser.add_argument("--decimal", type=int, metavar="K",
                        help="add a K-digit decimal rendering beside each fraction")
    parser.add_argument("--seed", metavar="N",
                        help="rejected: every computation here is deterministic")
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(handler=fn)
        return p

    p = verb("validate", _cmd_validate, help="check the metric-algebra invariants")
    p.add_argument("algebra")
    p = verb("quantitative", _cmd_quantitative,
             help="check that every operation is non-expansive")
    p.add_argument("algebra")
    p = verb("sat", _cmd_sat, help="check equations against an algebra")
    p.add_argument("algebra")
    p.add_argument("equations")
    p.add_argument("--max-valuations", type=int, default=10 ** 6)
    p = verb("product", _cmd_product, help="product with the sup metric")
    p.add_argument("algebras", nargs="+")
    p.add_argument("--max-size", type=int, default=10 ** 6)
    p = verb("subalg", _cmd_subalg, help="subalgebra generated by elements")
    p.add_argument("algebra")
    p.add_argument("--gens", required=True, metavar="a,b",
                   help="comma-separated element names")
    p = verb("congruences", _cmd_congruences, help="enumerate all congruences")
    p.add_argument("algebra")
    p.add_argument("--max-size", type=int, default=6)
    p = verb("quotient", _cmd_quotient,
             help="quotient by a congruence, canonical greatest metric")
    p.add_argument("algebra")
    p.add_argument("--blocks", required=True, metavar='"0 1|2 3"',
                   help="blocks of element names, | separated")
    p = verb("factor", _cmd_factor,
             help="factor q through p (h with h . p = q)")
    p.add_argument("p", help="homomorphism JSON: source, target, map")
    p.add_argument("q", help="homomorphism JSON: source, target, map")
    p.add_argument("--metric", action="store_true",
                   help="require the metric kernel condition; h is non-expansive")
    p = verb("scale", _cmd_scale, help="shrink all distances by a rational factor")
    p.add_argument("algebra")
    p.add_argument("--by", required=True, metavar="1/2")
    p = verb("free", _cmd_free, help="free algebra over the given class")
    p.add_argument("algebras", nargs="+")
    p.add_argument("--vars", required=True, metavar="x,y")
    p.add_argument("--max-size", type=int, default=100_000,
                   help="free-carrier cap")
    p = verb("theory", _cmd_theory, help="bounded equational theory of a class")
    p.add_argument("algebras", nargs="+")
    p.add_argument("--vars", required=True, metavar="x,y")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--max-depth", type=int, default=4)
    p = verb("member", _cmd_member,
             help="bounded variety-membership test against a class")
    p.add_argument("algebras", nargs="+")
    p.add_argument("--candidate", required=True)
    p.add_argument("--vars", default="x,y", metavar="x,y")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--max-depth", type=int, default=4)
    p = verb("hsp", _cmd_hsp,
             help="closure suite: products, subalgebras, quotients of models")
    p.add_argument("equations")
    p.add_argument("algebras", nargs="+")
    p.add_argument("--max-size", type=int, default=10 ** 6)
    p = verb("demo-nonvariety", _cmd_demo,
             help="scaling quotient destroys a distance lower bound")
    p.add_argument("--scale", default="1/2")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is not None:
        print("error: --seed has no effect; all computations are deterministic "
              "and need no randomness", file=sys.stderr)
        return 2
    reporter = _Reporter(args.decimal)
    try:
        code, lines, payload = args.handler(args, reporter)
    except (ParseError, BoundExceeded, EvaluationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NotACongruence, FactorizationError, ExtensionError) as exc:
        # a property failed, with a witness in the message
        print(str(exc))
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                json.dump({"verb": args.verb, "ok": False, "error": str(exc)},
                          fh, indent=2, sort_keys=True)
                fh.write("\n")
        return 1
    for line in lines:
        print(line)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
