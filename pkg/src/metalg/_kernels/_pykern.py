"""Pure-Python kernels: the reference twin of the compiled module.

Same call signatures as ``_ckern``.  Entries here may be any exactly
comparable numbers (int, Fraction, float infinity); the compiled twin is
restricted to int64, so callers encode exact distances as scaled
integers or order ranks before selecting a backend.  All scans are
deterministic: the first witness in lexicographic enumeration order is
returned, whatever the backend.
"""

from __future__ import annotations


def metric_violation(n, d):
    """First metric-axiom violation in the flat n*n matrix ``d``, or None.

    Returns (code, i, j, k) with unused slots -1:
      1 nonzero diagonal at i; 2 asymmetry at (i, j); 3 zero distance
      between distinct i, j; 4 triangle failure d(i,k) > d(i,j) + d(j,k),
      reported as (i, k, j).
    """
    for i in range(n):
        if d[i * n + i] != 0:
            return (1, i, -1, -1)
    for i in range(n):
        for j in range(i + 1, n):
            if d[i * n + j] != d[j * n + i]:
                return (2, i, j, -1)
    for i in range(n):
        for j in range(i + 1, n):
            if d[i * n + j] == 0:
                return (3, i, j, -1)
    for i in range(n):
        for k in range(n):
            dik = d[i * n + k]
            for j in range(n):
                if dik > d[i * n + j] + d[j * n + k]:
                    return (4, i, k, j)
    return None


def metric_closure(n, d):
    """All-pairs shortest-path closure of the flat n*n weight matrix."""
    out = list(d)
    for k in range(n):
        kn = k * n
        for i in range(n):
            dik = out[i * n + k]
            base = i * n
            for j in range(n):
                alt = dik + out[kn + j]
                if alt < out[base + j]:
                    out[base + j] = alt
    return out


def eval_scan(nv, n, prog_l, prog_r, arity, offset, tables, drank, eps_rank):
    """Evaluate two term programs over all n**nv valuations.

    Programs are postfix: code < nv pushes the valuation of that
    variable slot; code >= nv applies operation code - nv via its flat
    table.  ``drank`` holds order ranks of the distance matrix.

    With eps_rank >= 0, stops at the first valuation whose distance rank
    exceeds eps_rank and returns (rank, valuation_index); returns
    (max_rank, -1) if none.  With eps_rank < 0, scans everything and
    returns (max_rank, -1).
    """
    total = n ** nv
    digits = [0] * nv
    stack = [0] * (max(len(prog_l), len(prog_r)) + 1)

    def run(prog):
        sp = 0
        for code in prog:
            if code < nv:
                stack[sp] = digits[code]
                sp += 1
            else:
                oi = code - nv
                k = arity[oi]
                idx = 0
                if k:
                    sp -= k
                    for t in range(k):
                        idx = idx * n + stack[sp + t]
                stack[sp] = tables[offset[oi] + idx]
                sp += 1
        return stack[0]

    mx = 0
    for v_idx in range(total):
        a = run(prog_l)
        b = run(prog_r)
        r = drank[a * n + b]
        if eps_rank >= 0 and r > eps_rank:
            return (r, v_idx)
        if r > mx:
            mx = r
        # odometer: last variable slot is least significant
        for slot in range(nv - 1, -1, -1):
            digits[slot] += 1
            if digits[slot] < n:
                break
            digits[slot] = 0
    return (mx, -1)


def nonexpansive_scan(k, n, table, drank):
    """First pair of argument tuples where the operation expands the sup
    distance: rank d(t(x), t(y)) > max_i rank d(x_i, y_i).  Returns
    (x_tuple, y_tuple) or None.  Enumeration is lexicographic over the
    concatenated tuple (x, y)."""
    total = n ** k
    xs = [0] * k
    for xi in range(total):
        x_idx = 0
        for t in range(k):
            x_idx = x_idx * n + xs[t]
        tx = table[x_idx]
        ys = [0] * k
        for yi in range(total):
            y_idx = 0
            m = 0
            for t in range(k):
                y_idx = y_idx * n + ys[t]
                r = drank[xs[t] * n + ys[t]]
                if r > m:
                    m = r
            if drank[tx * n + table[y_idx]] > m:
                return (tuple(xs), tuple(ys))
            for slot in range(k - 1, -1, -1):
                ys[slot] += 1
                if ys[slot] < n:
                    break
                ys[slot] = 0
        for slot in range(k - 1, -1, -1):
            xs[slot] += 1
            if xs[slot] < n:
                break
            xs[slot] = 0
    return None


def pairwise_sup(m, nvals, values, drank, n):
    """Sup-distance ranks between m value vectors of length nvals.

    ``values`` is flat m*nvals carrier indices; the result is a flat
    symmetric m*m rank matrix (diagonal 0)."""
    out = [0] * (m * m)
    for i in range(m):
        vi = i * nvals
        for j in range(i + 1, m):
            vj = j * nvals
            mx = 0
            for t in range(nvals):
                r = drank[values[vi + t] * n + values[vj + t]]
                if r > mx:
                    mx = r
            out[i * m + j] = mx
            out[j * m + i] = mx
    return out
