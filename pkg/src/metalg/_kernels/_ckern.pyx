# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: int64 twin of ``_pykern``.

Callers encode exact distances as scaled integers (with a large finite
sentinel for infinity) or as order ranks; both encodings preserve the
exact comparisons these scans perform.  Witness order is identical to
the pure twin.
"""

from libc.stdlib cimport free, malloc


def metric_violation(long long n, long long[:] d):
    cdef long long i, j, k, dik
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


def metric_closure(long long n, long long[:] d):
    cdef long long k, i, j, dik, alt
    out = [0] * (n * n)
    cdef long long* w = <long long*> malloc(n * n * sizeof(long long))
    if w == NULL:
        raise MemoryError()
    try:
        for i in range(n * n):
            w[i] = d[i]
        for k in range(n):
            for i in range(n):
                dik = w[i * n + k]
                for j in range(n):
                    alt = dik + w[k * n + j]
                    if alt < w[i * n + j]:
                        w[i * n + j] = alt
        for i in range(n * n):
            out[i] = w[i]
    finally:
        free(w)
    return out


def eval_scan(long long nv, long long n, long long[:] prog_l, long long[:] prog_r,
              long long[:] arity, long long[:] offset, long long[:] tables,
              long long[:] drank, long long eps_rank):
    cdef long long total = 1
    cdef long long i
    for i in range(nv):
        total *= n
    cdef long long lp = prog_l.shape[0]
    cdef long long rp = prog_r.shape[0]
    cdef long long stack_size = (lp if lp > rp else rp) + 1
    cdef long long* digits = <long long*> malloc((nv + 1) * sizeof(long long))
    cdef long long* stack = <long long*> malloc(stack_size * sizeof(long long))
    if digits == NULL or stack == NULL:
        free(digits)
        free(stack)
        raise MemoryError()
    cdef long long v_idx, a, b, r, mx = 0, slot
    try:
        for i in range(nv):
            digits[i] = 0
        for v_idx in range(total):
            a = _run(prog_l, lp, nv, n, digits, stack, arity, offset, tables)
            b = _run(prog_r, rp, nv, n, digits, stack, arity, offset, tables)
            r = drank[a * n + b]
            if eps_rank >= 0 and r > eps_rank:
                return (r, v_idx)
            if r > mx:
                mx = r
            slot = nv - 1
            while slot >= 0:
                digits[slot] += 1
                if digits[slot] < n:
                    break
                digits[slot] = 0
                slot -= 1
        return (mx, -1)
    finally:
        free(digits)
        free(stack)


cdef inline long long _run(long long[:] prog, long long plen, long long nv,
                           long long n, long long* digits, long long* stack,
                           long long[:] arity, long long[:] offset,
                           long long[:] tables):
    cdef long long sp = 0, p, code, oi, k, idx, t
    for p in range(plen):
        code = prog[p]
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


def nonexpansive_scan(long long k, long long n, long long[:] table, long long[:] drank):
    cdef long long total = 1
    cdef long long i
    for i in range(k):
        total *= n
    cdef long long* xs = <long long*> malloc((k + 1) * sizeof(long long))
    cdef long long* ys = <long long*> malloc((k + 1) * sizeof(long long))
    if xs == NULL or ys == NULL:
        free(xs)
        free(ys)
        raise MemoryError()
    cdef long long xi, yi, t, x_idx, y_idx, m, r, tx, slot
    try:
        for t in range(k):
            xs[t] = 0
        for xi in range(total):
            x_idx = 0
            for t in range(k):
                x_idx = x_idx * n + xs[t]
            tx = table[x_idx]
            for t in range(k):
                ys[t] = 0
            for yi in range(total):
                y_idx = 0
                m = 0
                for t in range(k):
                    y_idx = y_idx * n + ys[t]
                    r = drank[xs[t] * n + ys[t]]
                    if r > m:
                        m = r
                if drank[tx * n + table[y_idx]] > m:
                    return (tuple([xs[t] for t in range(k)]),
                            tuple([ys[t] for t in range(k)]))
                slot = k - 1
                while slot >= 0:
                    ys[slot] += 1
                    if ys[slot] < n:
                        break
                    ys[slot] = 0
                    slot -= 1
            slot = k - 1
            while slot >= 0:
                xs[slot] += 1
                if xs[slot] < n:
                    break
                xs[slot] = 0
                slot -= 1
        return None
    finally:
        free(xs)
        free(ys)


def pairwise_sup(long long m, long long nvals, long long[:] values,
                 long long[:] drank, long long n):
    out = [0] * (m * m)
    cdef long long i, j, t, mx, r, vi, vj
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
