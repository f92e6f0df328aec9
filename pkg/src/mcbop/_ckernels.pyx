# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of :mod:`mcbop._pykernels` (same signatures, same results)."""


def matmul(list a, list b, Py_ssize_t n, Py_ssize_t k, Py_ssize_t m, object zero):
    cdef list out = [zero] * (n * m)
    cdef Py_ssize_t i, t, j, base, boff
    cdef object x, y
    for i in range(n):
        base = i * m
        for t in range(k):
            x = a[i * k + t]
            if x == 0:
                continue
            boff = t * m
            for j in range(m):
                y = b[boff + j]
                if y == 0:
                    continue
                out[base + j] = out[base + j] + x * y
    return out


def gauss_jordan(list a, list b, Py_ssize_t n, Py_ssize_t m, object is_unit, object inv, bint partial):
    cdef list A = [a[i * n:(i + 1) * n] for i in range(n)]
    cdef list B = [b[i * m:(i + 1) * m] for i in range(n)]
    cdef Py_ssize_t col, r, j, piv
    cdef list prow, pb, row, rb
    cdef object s, f, pj, best, v
    for col in range(n):
        piv = -1
        if partial:
            best = None
            for r in range(col, n):
                v = abs((<list>A[r])[col])
                if best is None or v > best:
                    best = v
                    piv = r
            if piv < 0 or not is_unit((<list>A[piv])[col]):
                return None
        else:
            for r in range(col, n):
                if is_unit((<list>A[r])[col]):
                    piv = r
                    break
            if piv < 0:
                return None
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            B[col], B[piv] = B[piv], B[col]
        prow = <list>A[col]
        pb = <list>B[col]
        s = inv(prow[col])
        for j in range(col + 1, n):
            prow[j] = prow[j] * s
        for j in range(m):
            pb[j] = pb[j] * s
        for r in range(n):
            if r == col:
                continue
            row = <list>A[r]
            f = row[col]
            if f == 0:
                continue
            for j in range(col + 1, n):
                pj = prow[j]
                if pj != 0:
                    row[j] = row[j] - f * pj
            rb = <list>B[r]
            for j in range(m):
                pj = pb[j]
                if pj != 0:
                    rb[j] = rb[j] - f * pj
    cdef list out = []
    for row in B:
        out.extend(row)
    return out
