"""metalg: a workbench for finite metric algebras.

Exact extended metrics (rationals plus infinity), operation tables,
quantitative (non-expansiveness) checks, homomorphisms, sup-metric
products, generated subalgebras, congruence quotients with the
canonical greatest metric, quotient factorization, free algebras over
finite classes, bounded equational theories and variety-membership
tests, all at desk scale and all deterministic.

Hot scans run on a compiled kernel when available; set
``METALG_BACKEND=pure`` to force the pure-Python twin.
"""

from ._kernels import backend_name
from .errors import (BoundExceeded, EvaluationError, ExtensionError,
                     FactorizationError, MetalgError, NotACongruence, ParseError)
from .terms import (App, Signature, Term, Var, depth, format_term,
                    parse_signature, parse_term, terms_up_to_depth, vars_of)
from .metric import (INF, Dist, DistMatrix, MetricViolation, Partition,
                     all_partitions, as_dist, check_metric_axioms, discrete_metric,
                     dist_from_json, dist_to_json, format_dist, parse_dist,
                     quotient_metric, sup_product)
from .algebra import (ExpansionWitness, HomDefect, Homomorphism, MetricAlgebra,
                      ProductResult, QuotientResult, ScaleResult, SubalgebraResult,
                      check_homomorphism, enumerate_congruences, factor_homomorphism,
                      factor_m_homomorphism, generated_subalgebra, is_quantitative,
                      m_product, m_quotient, quantitative_witness, scale_metric,
                      validate_algebra)
from .semantics import (MEquation, SatWitness, Valuation, counterexample, eval_term,
                        first_failure, format_equations, parse_equations, satisfies,
                        satisfies_all, sup_distance, sup_distance_table)
from .free import (ClassK, ClosureReport, ConsistentUpTo, DemoReport, FreeAlgebra,
                   Refuted, Theory, TheoryEntry, equational_theory, free_algebra,
                   free_distance, hsp_closure_suite, membership_bounded,
                   non_variety_demo, universal_extension)

__version__ = "0.1.0"
