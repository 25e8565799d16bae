"""Backend parity: the compiled kernels must agree with the pure twins
bit for bit, witnesses included."""

import random
from array import array

import pytest

from metalg import _kernels
from metalg._kernels import _pykern

compiled = _kernels.compiled
needs_compiled = pytest.mark.skipif(compiled is None,
                                    reason="compiled kernel not built")

BIG = 1 << 61


def random_int_matrix(rng, n, with_inf=True, lo=0, hi=50):
    d = [0] * (n * n)
    for i in range(n):
        for j in range(i + 1, n):
            v = BIG if (with_inf and rng.random() < 0.2) else rng.randint(lo, hi)
            d[i * n + j] = v
            if rng.random() < 0.9:
                d[j * n + i] = v  # mostly symmetric so deeper scans get exercised
            else:
                d[j * n + i] = BIG if v == BIG else rng.randint(lo, hi)
        if rng.random() < 0.05:
            d[i * n + i] = 1
    return d


def test_backend_selected():
    assert _kernels.BACKEND in ("c", "pure")
    assert _kernels.backend_name() == _kernels.BACKEND


@needs_compiled
def test_metric_violation_parity():
    rng = random.Random(0)
    for _ in range(300):
        n = rng.randint(1, 7)
        d = random_int_matrix(rng, n)
        assert compiled.metric_violation(n, array("q", d)) == \
            _pykern.metric_violation(n, d)


@needs_compiled
def test_metric_closure_parity():
    rng = random.Random(1)
    for _ in range(200):
        n = rng.randint(1, 8)
        d = random_int_matrix(rng, n)
        for i in range(n):
            d[i * n + i] = 0
        assert compiled.metric_closure(n, array("q", d)) == \
            _pykern.metric_closure(n, d)


@needs_compiled
def test_eval_scan_parity():
    rng = random.Random(2)
    for _ in range(200):
        n = rng.randint(2, 4)
        nv = rng.randint(0, 3)
        # one unary op (id 0) and one binary op (id 1)
        arity = array("q", [1, 2])
        offset = array("q", [0, n])
        tables = array("q", [rng.randrange(n) for _ in range(n + n * n)])
        drank = array("q", [0 if i == j else rng.randint(1, 5)
                            for i in range(n) for j in range(n)])

        def random_prog(depth=0):
            if nv and (depth > 2 or rng.random() < 0.4):
                return [rng.randrange(nv)]
            if rng.random() < 0.5:
                return random_prog(depth + 1) + [nv + 0]
            return random_prog(depth + 1) + random_prog(depth + 1) + [nv + 1]

        if nv == 0:
            continue
        pl = array("q", random_prog())
        pr = array("q", random_prog())
        for eps_rank in (-1, 0, 2, 10):
            got = compiled.eval_scan(nv, n, pl, pr, arity, offset, tables,
                                     drank, eps_rank)
            want = _pykern.eval_scan(nv, n, pl, pr, arity, offset, tables,
                                     drank, eps_rank)
            assert got == want


@needs_compiled
def test_nonexpansive_scan_parity():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(2, 4)
        k = rng.randint(1, 3)
        table = array("q", [rng.randrange(n) for _ in range(n ** k)])
        drank = array("q", [0 if i == j else rng.randint(1, 4)
                            for i in range(n) for j in range(n)])
        assert compiled.nonexpansive_scan(k, n, table, drank) == \
            _pykern.nonexpansive_scan(k, n, table, drank)


@needs_compiled
def test_pairwise_sup_parity():
    rng = random.Random(4)
    for _ in range(100):
        n = rng.randint(2, 4)
        m = rng.randint(1, 6)
        nvals = rng.randint(1, 9)
        values = array("q", [rng.randrange(n) for _ in range(m * nvals)])
        drank = array("q", [0 if i == j else rng.randint(1, 4)
                            for i in range(n) for j in range(n)])
        assert compiled.pairwise_sup(m, nvals, values, drank, n) == \
            _pykern.pairwise_sup(m, nvals, values, drank, n)


def test_huge_denominators_bypass_the_scaled_encoding():
    # denominators whose lcm exceeds the int64 budget must fall back to
    # the exact pure path, whatever backend is selected
    from fractions import Fraction as F
    from metalg import DistMatrix, Partition, check_metric_axioms, quotient_metric
    p, q = (1 << 31) - 1, (1 << 31) + 11  # coprime, lcm ~ 2^62
    a, b = F(1, p), F(1, q)
    rows = [[F(0), a, a + b],
            [a, F(0), b],
            [a + b, b, F(0)]]
    assert check_metric_axioms(rows) is None
    bad = [list(r) for r in rows]
    bad[0][2] = bad[2][0] = a + b + F(1, p * q)
    v = check_metric_axioms(bad)
    assert v is not None and v.kind == "triangle"
    m = DistMatrix(tuple(tuple(r) for r in rows))
    qm = quotient_metric(m, Partition.from_blocks([[0], [1], [2]]))
    assert qm.entries == m.entries


def test_backend_env_override():
    import os
    import subprocess
    import sys
    out = subprocess.run(
        [sys.executable, "-c", "import metalg; print(metalg.backend_name())"],
        env={**os.environ, "METALG_BACKEND": "pure"},
        capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "pure"


def test_pure_kernels_accept_exact_values():
    # the pure twin also runs directly on Fractions and float infinity
    from fractions import Fraction as F
    from metalg import INF
    rows = [F(0), F(1), INF,
            F(1), F(0), INF,
            INF, INF, F(0)]
    assert _pykern.metric_violation(3, rows) is None
    # a finite path undercutting an infinite edge is a triangle violation
    bad = [F(0), F(1), INF,
           F(1), F(0), F(1, 2),
           INF, F(1, 2), F(0)]
    assert _pykern.metric_violation(3, bad) == (4, 0, 2, 1)
    closed = _pykern.metric_closure(3, [F(0), F(1), INF,
                                        F(1), F(0), F(10),
                                        INF, F(10), F(0)])
    assert closed[2] == F(11)  # the infinite edge shortcuts through the middle
