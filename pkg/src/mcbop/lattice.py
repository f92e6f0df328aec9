"""Four-term recurrence, t1 evolution, the noncommutative C-Toda lattice and its Lax pair.

Families built over the jet ring carry ``d/dt1`` in the first jet
coefficient, so every derivative identity is checked as an exact equality of
rational matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .blockmat import Mat, invert, is_invertible
from .cbop import MatPoly, PolyFamily, inner_product
from .errors import TruncationTooSmall, VnSingular
from .report import ResidualReport, absm

LAX_RTOL = 1e-7


@dataclass
class RecurrenceCoeffs:
    """``x(P_{n+1} + a_n P_n) = P_{n+2} + b_n P_{n+1} + c_n P_n + d_n P_{n-1}``."""

    a: list
    b: list
    c: list
    d: list
    b_alt: list = field(default_factory=list)
    c_alt: list = field(default_factory=list)
    status: str = "complete"


def pair_moments(f: MatPoly, g: MatPoly, table) -> Mat:
    """``<f, g> = sum_ij f_i m_ij g_j`` through the moment table."""
    acc = Mat.zeros(table.p, table.p, table.ring)
    for i, fi in enumerate(f.coeffs):
        for j, gj in enumerate(g.coeffs):
            acc = acc + fi @ table.m[i][j] @ gj
    return acc


def recurrence(F: PolyFamily) -> RecurrenceCoeffs:
    a, b, c, d, b_alt, c_alt = [], [], [], [], [], []
    top = F.n_max
    for n in range(top + 1):
        if not is_invertible(F.V[n]):
            raise VnSingular(n)
        a.append(-(F.V[n + 1] @ invert(F.V[n])))
    for n in range(top):
        Hn_inv = F.Hinv(n)
        an = a[n]
        b.append(-F.sub(n + 2) + F.sub(n + 1) + an)
        c.append(-(F.H[n + 1] @ Hn_inv) + an @ F.H[n] @ (F.sub(n + 1).T - F.sub(n).T) @ Hn_inv)
        d.append(Mat.zeros(F.p, F.p, F.ring) if n == 0 else -(an @ F.H[n] @ F.Hinv(n - 1)))
        # inner-product forms from the proof of the recurrence
        b_alt.append(F.Z[n + 1].T @ F.Hinv(n + 1) + F.sub(n + 1) + an)
        if F.route == "nodes":
            yPP = inner_product(F.P(n), F.Q(n).mul_x(), F.measure)
        else:
            yPP = pair_moments(F.P(n), F.Q(n).mul_x(), F.table)
        c_alt.append(-((F.H[n + 1] + an @ yPP) @ Hn_inv))
    status = "complete" if top >= 1 else "partial: only a_0 defined (needs P_2 for b, c, d)"
    return RecurrenceCoeffs(a, b, c, d, b_alt, c_alt, status)


def check_recurrence(F: PolyFamily, R: RecurrenceCoeffs) -> ResidualReport:
    rep = ResidualReport("four-term recurrence")
    for n in range(len(R.b)):
        lhs = (F.P(n + 1) + F.P(n).lmul(R.a[n])).mul_x()
        terms = [F.P(n + 2), F.P(n + 1).lmul(R.b[n]), F.P(n).lmul(R.c[n])]
        if n > 0:
            terms.append(F.P(n - 1).lmul(R.d[n]))
        rhs = terms[0]
        for t in terms[1:]:
            rhs = rhs + t
        width = n + 3
        scale = max([lhs.max_abs()] + [t.max_abs() for t in terms])
        rep.compare("recurrence", n, lhs.as_column(width), rhs.as_column(width), scale=scale)
        rep.compare("b_routes", n, R.b[n], R.b_alt[n])
        rep.compare("c_routes", n, R.c[n], R.c_alt[n])
    if R.d:
        rep.zero("d0_zero", 0, R.d[0])
    return rep


def _require_jets(F: PolyFamily):
    if not F.ring.is_jet:
        raise ValueError("derivative checks need a family built over jets (measure with an active flow)")


def check_evolution(F: PolyFamily, R: Optional[RecurrenceCoeffs] = None) -> ResidualReport:
    """Evolution of ``P_{n+1} + a_n P_n``, ``dH_n`` in both forms, and ``d xi_{n+1,n}``."""
    _require_jets(F)
    R = R or recurrence(F)
    rep = ResidualReport("t1 evolution")
    for n in range(F.n_max + 1):
        an = R.a[n]
        f = F.P(n + 1) + F.P(n).lmul(an)
        gamma = (F.sub(n + 1) + an).d
        lhs = f.part(1)
        rhs = F.P(n).part(0).lmul(gamma)
        rep.compare("wave_evolution", n, lhs.as_column(n + 2), rhs.as_column(n + 2), scale=max(lhs.max_abs(), rhs.max_abs(), gamma.max_abs()))
        H = F.H[n].value
        dH = F.H[n].d
        s = F.sub(n).value - F.sub(n + 1).value
        rep.compare("dH_xi_form", n, dH, s @ H + H @ s.T, terms=(dH, (s, H), (H, s.T)))
        V = F.V[n].value
        rep.compare("dH_VVt", n, dH, V @ V.T, terms=(dH, (V, V.T)))
        V1, Hi = F.V[n + 1].value, invert(H)
        rep.compare("dxi_VVtHinv", n, F.sub(n + 1).d, -(V1 @ V.T @ Hi), terms=(F.sub(n + 1).d, (V1, V.T, Hi)))
    return rep


def check_nc_ctoda(F: PolyFamily, R: Optional[RecurrenceCoeffs] = None, n_top: Optional[int] = None) -> ResidualReport:
    """The three lattice equations plus the two equivalent forms."""
    _require_jets(F)
    R = R or recurrence(F)
    rep = ResidualReport("noncommutative C-Toda")
    top = F.n_max if n_top is None else min(n_top, F.n_max)
    for n in range(top + 1):
        a = R.a[n].value
        H = F.H[n].value
        dH = F.H[n].d
        dH1 = F.H[n + 1].d
        e = F.sub(n + 1).d
        s = F.sub(n).value - F.sub(n + 1).value
        rep.compare("nc_eq1", n, a @ dH, e @ H, terms=((a, dH), (e, H)))
        rep.compare("nc_eq2", n, dH1, a @ H @ e.T, terms=(dH1, (a, H, e.T)))
        rep.compare("nc_eq3", n, dH, s @ H + H @ s.T, terms=(dH, (s, H), (H, s.T)))
        rep.compare("nc_eq2_equiv", n, dH1, a @ dH @ a.T, terms=(dH1, (a, dH, a.T)))
        Hi = invert(H)
        rep.compare("nc_eq1_equiv", n, e, a @ dH @ Hi, terms=(e, (a, dH, Hi)))
    return rep


def _abs_eval(P: MatPoly, x) -> Mat:
    """``sum_k |c_k| |x|^k`` entrywise: the rounding scale of ``P(x)``."""
    ax = abs(float(x.c0 if hasattr(x, "c0") else x))
    acc = None
    for k, c in enumerate(P.coeffs):
        t = absm(c).scale(ax ** k)
        acc = t if acc is None else acc + t
    return acc


@dataclass
class LaxOps:
    """Block truncations of ``A`` (bidiagonal), ``B`` (four bands) and ``C`` (diagonal)."""

    T: int
    p: int
    A: Mat
    B: Mat
    C: Mat


def lax_operators(F: PolyFamily, R: RecurrenceCoeffs, T: int) -> LaxOps:
    """Assemble ``T x T`` block truncations; coefficients beyond the data are zero-filled.

    Only blocks of ``L = A^{-1} B`` in columns ``j <= T - 3`` are independent
    of the truncation, the zero fill and the unit placed in the last diagonal
    block of ``A``.
    """
    p, ring = F.p, F.ring
    z = Mat.zeros(p, p, ring)
    eye = Mat.identity(p, ring)

    def get(seq, n):
        return seq[n] if 0 <= n < len(seq) else z

    A = [[z] * T for _ in range(T)]
    B = [[z] * T for _ in range(T)]
    zb = z.value
    C = [[zb] * T for _ in range(T)]
    for n in range(T):
        # the last diagonal block never reaches columns <= T-3 of L; a unit
        # there keeps A invertible when a_{T-1} is zero or missing
        A[n][n] = get(R.a, n) if n < T - 1 else eye
        if n + 1 < T:
            A[n][n + 1] = eye
        if n >= 1:
            B[n][n - 1] = get(R.d, n)
        B[n][n] = get(R.c, n)
        if n + 1 < T:
            B[n][n + 1] = get(R.b, n)
        if n + 2 < T:
            B[n][n + 2] = eye
        C[n][n] = F.sub(n + 1).d if n + 1 <= F.top else zb
    return LaxOps(T, p, Mat.from_blocks(A, ring), Mat.from_blocks(B, ring), Mat.from_blocks(C, zb.ring))


def check_lax(F: PolyFamily, R: Optional[RecurrenceCoeffs] = None, T: int = 6, samples=None) -> ResidualReport:
    """``dL/dt = N L - L N`` with ``L = A^{-1} B``, ``N = A^{-1} C`` on a ``T``-block truncation.

    ``A^{-1}`` is upper triangular and full, so the truncation only corrupts
    the last two block columns of ``L``; the residual is checked on block
    columns ``0..T-3`` of every block row.  The spectral and time relations
    ``A x Phi = B Phi`` and ``A dPhi = C Phi`` are checked at sample points.
    """
    if T < 5:
        raise TruncationTooSmall(f"Lax truncation T={T} < 5")
    R = R or recurrence(F)
    need = T - 2
    if len(R.b) <= need or len(R.a) <= need or F.top < need + 1:
        raise ValueError(f"Lax check at T={T} needs recurrence coefficients through n={need}; family has {len(R.b) - 1}")
    rep = ResidualReport("Lax pair", rtol=LAX_RTOL)
    ops = lax_operators(F, R, T)
    p = F.p
    Ainv = invert(ops.A)
    L = Ainv @ ops.B
    L0 = L.value
    N = Ainv.value @ ops.C
    dL = L.d
    comm = N @ L0 - L0 @ N
    cols = range(0, (T - 2) * p)
    full = range(T * p)
    for n in range(T):
        rows = range(n * p, (n + 1) * p)
        terms = (dL.submatrix(rows, cols),
                 (N.submatrix(rows, full), L0.submatrix(full, cols)),
                 (L0.submatrix(rows, full), N.submatrix(full, cols)))
        rep.compare("lax_compat", n, dL.submatrix(rows, cols), comm.submatrix(rows, cols), terms=terms)

    # A x Phi = B Phi, A dPhi = C Phi at sample points
    if samples is None:
        samples = [x for x, _ in (F.measure.nodes if F.measure is not None else ())][:3]
        samples.append(samples[0] * 0 + 1 if samples else 1)
    for x in samples:
        Phi = [F.P(k)(x) for k in range(T)]
        absPhi = [_abs_eval(F.P(k), x) for k in range(T)]
        absdPhi = [_abs_eval(F.P(k).part(1), x) for k in range(T)]
        X = Mat.identity(p, absPhi[0].ring).scale(abs(float(x)) if not ops.A.ring.exact else 1.0)
        for n in range(T - 2):
            Ann, Bnn, Bn1 = ops.A.block(n, n, p), ops.B.block(n, n, p), ops.B.block(n, n + 1, p)
            lhs = (Ann @ Phi[n] + Phi[n + 1]).scale(x)
            rhs = Bnn @ Phi[n] + Bn1 @ Phi[n + 1] + Phi[n + 2]
            terms = [(X, Ann, absPhi[n]), (X, absPhi[n + 1]), (Bnn, absPhi[n]), (Bn1, absPhi[n + 1]), absPhi[n + 2]]
            if n >= 1:
                Bd = ops.B.block(n, n - 1, p)
                rhs = rhs + Bd @ Phi[n - 1]
                terms.append((Bd, absPhi[n - 1]))
            rep.compare("spectral_AxPhi_BPhi", n, lhs, rhs, terms=tuple(terms))
        for n in range(T - 1):
            a = ops.A.block(n, n, p).value
            Cnn = ops.C.block(n, n, p)
            lhs = a @ Phi[n].d + Phi[n + 1].d
            rhs = Cnn @ Phi[n].value
            rep.compare("time_AdPhi_CPhi", n, lhs, rhs, terms=((a, absdPhi[n]), absdPhi[n + 1], (Cnn, absPhi[n])))
    return rep
