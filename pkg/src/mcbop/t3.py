"""The ``t3`` flow: annihilating test functions and the wave-function evolution.

With weights deformed by ``exp(t x^3)`` the pairing picks up the extra term
``<(x^2 - xy + y^2) f, g>``, which splits into products of single sums.
Test functions ``g`` with ``sum W g = sum y W g = 0`` make most of it vanish.
"""
from __future__ import annotations

from typing import Optional

from .blockmat import Mat, invert, qdet, solve
from .cbop import MatPoly, PolyFamily, single_sum
from .errors import Singular, SystemSingular
from .report import ResidualReport


def _require_t3(F: PolyFamily):
    if not F.ring.is_jet:
        raise ValueError("t3 checks need a family built over jets")
    if F.measure is not None and F.measure.flow != "t3":
        raise ValueError(f"t3 checks need the t3 flow, measure has flow={F.measure.flow!r}")
    if F.eta is not None:
        raise ValueError("t3 construction is implemented for symmetric measures only")


def trial_poly(F: PolyFamily, m: int, eta: Optional[Mat] = None, zeta: Optional[Mat] = None) -> MatPoly:
    """``g = P_m^T + P_{m-1}^T eta + P_{m-2}^T zeta`` (plain ``P_m^T`` without coefficients)."""
    g = F.P(m).T
    if eta is not None:
        g = g + F.P(m - 1).T.rmul(eta)
    if zeta is not None:
        g = g + F.P(m - 2).T.rmul(zeta)
    return g


def t3_construct(F: PolyFamily, m: int):
    """Solve for ``eta_m, zeta_m`` and cross-check against their quasideterminant forms.

    Returns ``(eta, zeta, report)``.  Raises :class:`SystemSingular` when the
    ``2 x 2`` block system built from ``V`` and ``U`` is singular.
    """
    if m < 2:
        raise ValueError("t3_construct needs m >= 2")
    if m > F.top:
        raise ValueError(f"family stores polynomials through n={F.top}, need m={m}")
    p = F.p
    Vt = [F.V[k].T for k in (m - 2, m - 1, m)]
    Ut = [F.U[k].T for k in (m - 2, m - 1, m)]
    system = Mat.from_blocks([[Vt[1], Vt[0]], [Ut[1], Ut[0]]])
    rhs = -Mat.from_blocks([[Vt[2]], [Ut[2]]])
    try:
        sol = solve(system, rhs)
    except Singular as exc:
        raise SystemSingular(f"t3 system for m={m} is singular") from exc
    eta = sol.submatrix(range(p), range(p))
    zeta = sol.submatrix(range(p, 2 * p), range(p))

    rep = ResidualReport(f"t3 construction m={m}")
    z = Mat.zeros(p, p, F.ring)
    eye = Mat.identity(p, F.ring)
    top = [Vt, Ut]
    eta_qd = qdet([top[0], top[1], [z, eye, z]])
    zeta_qd = qdet([top[0], top[1], [eye, z, z]])
    rep.compare("eta_quasidet", m, eta_qd, eta)
    rep.compare("zeta_quasidet", m, zeta_qd, zeta)

    g = trial_poly(F, m, eta, zeta)
    if F.measure is not None:
        s0 = single_sum(g, F.measure, side=2, power=0, right=True)
        s1 = single_sum(g, F.measure, side=2, power=1, right=True)
    else:
        s0 = Vt[2] + Vt[1] @ eta + Vt[0] @ zeta
        s1 = Ut[2] + Ut[1] @ eta + Ut[0] @ zeta
    scale = max(Vt[2].max_abs(), Ut[2].max_abs())
    rep.zero("annihilate_W", m, s0, scale=scale)
    rep.zero("annihilate_yW", m, s1, scale=scale)
    return eta, zeta, rep


def _left_sum(f: MatPoly, phi, k: int) -> Mat:
    """``sum_x x^k f(x) W(x)`` from single moments."""
    acc = Mat.zeros(f.p, f.p, phi[0].ring)
    for i, c in enumerate(f.coeffs):
        acc = acc + c @ phi[i + k]
    return acc


def _right_sum(g: MatPoly, psi, k: int) -> Mat:
    acc = Mat.zeros(g.p, g.p, psi[0].ring)
    for j, c in enumerate(g.coeffs):
        acc = acc + psi[j + k] @ c
    return acc


def _pair(f: MatPoly, g: MatPoly, m) -> Mat:
    acc = Mat.zeros(f.p, f.p, m[0][0].ring)
    for i, fi in enumerate(f.coeffs):
        for j, gj in enumerate(g.coeffs):
            acc = acc + fi @ m[i][j] @ gj
    return acc


def t3_wave_evolution(F: PolyFamily, n: int, a: Optional[list] = None):
    """Coefficients ``gamma_i`` of ``d/dt3 (P_{n+1} + a_n P_n) = sum_{i<=n} gamma_i P_i``.

    Each test function ``g_m`` (``m <= n``) gives one block equation
    ``sum_i gamma_i <P_i, g_m> = rhs_m``.  For ``m >= 2`` the annihilating
    ``g_m`` is used; for ``m < 2`` it is ``P_m^T`` and the surviving
    single-sum products move to the right-hand side.  Returns
    ``(gamma, report)`` where the report compares the expansion with the jet
    derivative coefficient by coefficient.
    """
    _require_t3(F)
    if n + 1 > F.top:
        raise ValueError(f"family stores polynomials through n={F.top}, need n+1={n + 1}")
    p = F.p
    table = F.table
    m0 = [[x.value for x in row] for row in table.m]
    phi0 = [x.value for x in table.phi]
    psi0 = [x.value for x in table.psi]
    if a is None:
        an = -(F.V[n + 1] @ invert(F.V[n]))
    else:
        an = a[n]
    f = F.P(n + 1) + F.P(n).lmul(an)
    f0 = f.part(0)
    d_aH = (an @ F.H[n]).d
    zero = Mat.zeros(p, p, d_aH.ring)

    G = [[None] * (n + 1) for _ in range(n + 1)]
    rhs = []
    for m in range(n + 1):
        if m >= 2:
            eta, zeta, _ = t3_construct(F, m)
            g = trial_poly(F, m, eta, zeta)
        else:
            g = trial_poly(F, m)
        g0 = g.part(0)
        for i in range(n + 1):
            G[i][m] = _pair(F.P(i).part(0), g0, m0)
        corr = (_left_sum(f0, phi0, 2) @ _right_sum(g0, psi0, 0)
                - _left_sum(f0, phi0, 1) @ _right_sum(g0, psi0, 1)
                + _left_sum(f0, phi0, 0) @ _right_sum(g0, psi0, 2))
        rhs.append((d_aH if m == n else zero) - corr)
    Gm = Mat.from_blocks(G)
    R = Mat.from_blocks([rhs])
    try:
        sol = solve(Gm.T, R.T).T
    except Singular as exc:
        raise SystemSingular(f"t3 wave system for n={n} is singular") from exc
    gamma = [sol.submatrix(range(p), range(i * p, (i + 1) * p)) for i in range(n + 1)]

    rep = ResidualReport(f"t3 wave evolution n={n}")
    expansion = MatPoly.zero(p, zero.ring)
    for i, gi in enumerate(gamma):
        expansion = expansion + F.P(i).part(0).lmul(gi)
    deriv = f.part(1)
    rep.compare("t3_wave_evolution", n, deriv.as_column(n + 2), expansion.as_column(n + 2),
                scale=max(deriv.max_abs(), expansion.max_abs()))
    rep.equal("t3_degree", n, deriv.degree <= n, detail=f"degree {deriv.degree}")
    return gamma, rep


def check_t3(F: PolyFamily, m_top: int = 2, n_top: int = 2) -> ResidualReport:
    """Run :func:`t3_construct` for ``2 <= m <= m_top`` and the wave evolution for ``n <= n_top``."""
    _require_t3(F)
    rep = ResidualReport("t3 flow")
    for m in range(2, min(m_top, F.top) + 1):
        try:
            rep.extend(t3_construct(F, m)[2])
        except SystemSingular as exc:
            rep.skip("t3_construct", m, str(exc))
    for n in range(0, min(n_top, F.n_max, F.top - 1) + 1):
        try:
            rep.extend(t3_wave_evolution(F, n)[1])
        except SystemSingular as exc:
            rep.skip("t3_wave_evolution", n, str(exc))
    return rep
