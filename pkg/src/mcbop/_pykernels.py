"""Pure-Python hot kernels over generic ring elements.

Matrices are flat row-major lists.  ``_ckernels.pyx`` implements the same
functions with identical signatures; :mod:`mcbop.kernels` picks one at import.
"""


def matmul(a, b, n, k, m, zero):
    out = [zero] * (n * m)
    for i in range(n):
        row = a[i * k:(i + 1) * k]
        base = i * m
        for t in range(k):
            x = row[t]
            if x == 0:
                continue
            boff = t * m
            for j in range(m):
                y = b[boff + j]
                if y == 0:
                    continue
                out[base + j] = out[base + j] + x * y
    return out


def gauss_jordan(a, b, n, m, is_unit, inv, partial):
    """Solve ``A X = B``; returns the flat ``X`` or ``None`` when no unit pivot exists.

    ``partial`` selects largest-magnitude pivoting (floats); otherwise the
    first unit in the column is used, which is exact for rationals and jets.
    """
    A = [a[i * n:(i + 1) * n] for i in range(n)]
    B = [b[i * m:(i + 1) * m] for i in range(n)]
    for col in range(n):
        piv = -1
        if partial:
            best = None
            for r in range(col, n):
                v = abs(A[r][col])
                if best is None or v > best:
                    best, piv = v, r
            if piv < 0 or not is_unit(A[piv][col]):
                return None
        else:
            for r in range(col, n):
                if is_unit(A[r][col]):
                    piv = r
                    break
            if piv < 0:
                return None
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            B[col], B[piv] = B[piv], B[col]
        prow = A[col]
        pb = B[col]
        s = inv(prow[col])
        for j in range(col + 1, n):
            prow[j] = prow[j] * s
        for j in range(m):
            pb[j] = pb[j] * s
        for r in range(n):
            if r == col:
                continue
            row = A[r]
            f = row[col]
            if f == 0:
                continue
            for j in range(col + 1, n):
                pj = prow[j]
                if pj != 0:
                    row[j] = row[j] - f * pj
            rb = B[r]
            for j in range(m):
                pj = pb[j]
                if pj != 0:
                    rb[j] = rb[j] - f * pj
    out = []
    for row in B:
        out.extend(row)
    return out
