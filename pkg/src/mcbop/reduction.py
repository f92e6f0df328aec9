"""Scalar (``p = 1``) reduction: tau and sigma determinants and the bilinear C-Toda form.

Determinants are computed here by elimination over the jet ring, without
going through :mod:`mcbop.blockmat`, so the bridge to the block quantities
is a genuine cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .blockmat import Mat
from .measure import MomentTable
from .report import ResidualReport


def jet_det(rows, ring):
    """Determinant of a square list-of-lists over ``ring``.

    Eliminates on unit pivots; a column with no unit left is expanded by
    cofactors instead (for jets, a zero value part can still carry nonzero
    derivatives).
    """
    a = [list(r) for r in rows]
    n = len(a)
    one = ring.one
    if n == 0:
        return one
    det = one
    for col in range(n):
        piv = next((r for r in range(col, n) if ring.is_unit(a[r][col])), None)
        if piv is None:
            sub = [row[col:] for row in a[col:]]
            return det * _laplace(sub, ring)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det = det * p
        pinv = ring.inv(p)
        for r in range(col + 1, n):
            f = a[r][col]
            if ring.is_zero(f):
                continue
            f = f * pinv
            row_r, row_c = a[r], a[col]
            for c in range(col + 1, n):
                row_r[c] = row_r[c] - f * row_c[c]
    return det


def _laplace(a, ring):
    n = len(a)
    if n == 1:
        return a[0][0]
    acc = ring.zero
    for r in range(n):
        if ring.is_zero(a[r][0]):
            continue
        minor = [row[1:] for k, row in enumerate(a) if k != r]
        term = a[r][0] * jet_det(minor, ring)
        acc = acc + term if r % 2 == 0 else acc - term
    return acc


@dataclass
class TauData:
    """``tau[n] = det(m_ij)_{i,j<n}`` and the bordered ``sigma[n]``; ``tau[0] = 1``."""

    tau: list
    sigma: list
    ring: object


def _scalar(mat: Mat):
    if mat.shape != (1, 1):
        raise ValueError("the scalar reduction needs p = 1")
    return mat[0, 0]


def tau_sigma(table: MomentTable, n_max: Optional[int] = None) -> TauData:
    """Compute ``tau_0..tau_{n_max+2}`` and ``sigma_0..sigma_{n_max+1}`` from a ``p = 1`` table."""
    if table.p != 1:
        raise ValueError("the scalar reduction needs p = 1")
    ring = table.ring
    m = [[_scalar(x) for x in row] for row in table.m]
    phi = [_scalar(x) for x in table.phi]
    order = table.order
    top_sigma = order if n_max is None else min(order, n_max + 1)
    top_tau = min(order + 1, top_sigma + 1)
    tau = [jet_det([[m[i][j] for j in range(n)] for i in range(n)], ring) for n in range(top_tau + 1)]
    sigma = [
        jet_det([[m[i][j] for j in range(n)] + [phi[i]] for i in range(n + 1)], ring)
        for n in range(top_sigma + 1)
    ]
    return TauData(tau, sigma, ring)


def _m(x, ring) -> Mat:
    return Mat(1, 1, (x,), ring)


def check_hirota(D: TauData, n_top: Optional[int] = None) -> ResidualReport:
    """``D_t tau_{n+1} . tau_n = sigma_n^2`` and ``D_t^2 tau_{n+1} . tau_{n+1} = 4 sigma_{n+1} sigma_n``."""
    if not D.ring.is_jet:
        raise ValueError("Hirota checks need jets (measure with the t1 flow)")
    base = D.ring.base
    rep = ResidualReport("Hirota bilinear C-Toda")
    top = len(D.sigma) - 2 if n_top is None else min(n_top, len(D.sigma) - 2)
    for n in range(top + 1):
        t0, t1 = D.tau[n], D.tau[n + 1]
        s0, s1 = D.sigma[n], D.sigma[n + 1]
        lhs1 = t1.derivative * t0.c0 - t1.c0 * t0.derivative
        rhs1 = s0.c0 * s0.c0
        scale1 = abs(t1.derivative * t0.c0) + abs(t1.c0 * t0.derivative) + abs(rhs1)
        rep.compare("hirota_1", n, _m(lhs1, base), _m(rhs1, base), scale=scale1)
        lhs2 = 2 * (t1.second_derivative * t1.c0 - t1.derivative * t1.derivative)
        rhs2 = 4 * s1.c0 * s0.c0
        scale2 = 2 * (abs(t1.second_derivative * t1.c0) + t1.derivative ** 2) + abs(rhs2)
        rep.compare("hirota_2", n, _m(lhs2, base), _m(rhs2, base), scale=scale2)
    return rep


def check_bridge(D: TauData, F, R=None, n_top: Optional[int] = None) -> ResidualReport:
    """Map ``tau, sigma`` to ``H_n``, ``a_n``, ``xi_{n+1,n}`` and compare with the block family.

    ``a_n`` carries a minus sign: ``V_n = sigma_n / tau_n`` and
    ``a_n = -V_{n+1} V_n^{-1}``.  The unsigned ratio is reported separately
    as ``a_unsigned_is_minus_a``.
    """
    from .lattice import recurrence

    ring = D.ring
    R = R or recurrence(F)
    rep = ResidualReport("tau bridge")
    limit = min(F.n_max, len(R.a) - 1, len(D.sigma) - 2, len(D.tau) - 2)
    top = limit if n_top is None else min(n_top, limit)
    for n in range(top + 1):
        tn, tn1 = D.tau[n], D.tau[n + 1]
        sn, sn1 = D.sigma[n], D.sigma[n + 1]
        rep.compare("H_tau", n, F.H[n], _m(tn1 / tn, ring))
        rep.compare("V_sigma", n, F.V[n], _m(sn / tn, ring))
        ratio = tn * sn1 / (sn * tn1)
        rep.compare("a_tau_sigma", n, R.a[n], _m(-ratio, ring))
        rep.compare("a_unsigned_is_minus_a", n, -R.a[n], _m(ratio, ring))
        if ring.is_jet:
            xi = _scalar(F.sub(n + 1))
            base = ring.base
            lhs0 = xi.c0
            rhs0 = -tn1.derivative / (2 * tn1.c0)
            rep.compare("xi_tau", n, _m(lhs0, base), _m(rhs0, base))
            # first derivative of -(1/2) tau'/tau
            rhs1 = -(tn1.second_derivative * tn1.c0 - tn1.derivative ** 2) / (2 * tn1.c0 ** 2)
            rep.compare("dxi_tau", n, _m(xi.derivative, base), _m(rhs1, base))
    return rep
