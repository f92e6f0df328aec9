"""Matrix-valued Cauchy bi-orthogonal polynomials built from a moment table.

The primary construction solves the block linear systems for the
coefficients; the quasideterminant expressions are evaluated separately and
compared against it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .blockmat import Mat, invert, is_invertible, qdet, solve
from .errors import MomentConditionViolated
from .measure import DiscreteMeasure, MomentTable, moments
from .report import ResidualReport
from .ring import Ring


class MatPoly:
    """Polynomial with p x p matrix coefficients, ascending powers."""

    __slots__ = ("coeffs", "p", "ring")

    def __init__(self, coeffs: Sequence[Mat], p: int, ring: Ring):
        self.coeffs = tuple(coeffs)
        self.p = p
        self.ring = ring

    @classmethod
    def zero(cls, p, ring):
        return cls((), p, ring)

    @classmethod
    def monomial(cls, k, p, ring, c: Optional[Mat] = None):
        z = Mat.zeros(p, p, ring)
        return cls([z] * k + [c if c is not None else Mat.identity(p, ring)], p, ring)

    @property
    def degree(self) -> int:
        for k in range(len(self.coeffs) - 1, -1, -1):
            if not self.coeffs[k].is_zero():
                return k
        return -1

    def coeff(self, k) -> Mat:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Mat.zeros(self.p, self.p, self.ring)

    def _binary(self, other, op):
        n = max(len(self.coeffs), len(other.coeffs))
        from .blockmat import join_rings

        ring = join_rings(self.ring, other.ring)
        return MatPoly([op(self.coeff(k), other.coeff(k)) for k in range(n)], self.p, ring)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def lmul(self, c: Mat) -> "MatPoly":
        """``c * f(x)``."""
        out = [c @ a for a in self.coeffs]
        return MatPoly(out, self.p, out[0].ring if out else self.ring)

    def rmul(self, c: Mat) -> "MatPoly":
        """``f(x) * c``."""
        out = [a @ c for a in self.coeffs]
        return MatPoly(out, self.p, out[0].ring if out else self.ring)

    def mul_x(self, k: int = 1) -> "MatPoly":
        if not self.coeffs:
            return self
        z = Mat.zeros(self.p, self.p, self.ring)
        return MatPoly([z] * k + list(self.coeffs), self.p, self.ring)

    @property
    def T(self) -> "MatPoly":
        return MatPoly([a.T for a in self.coeffs], self.p, self.ring)

    def part(self, k: int) -> "MatPoly":
        out = [a.part(k) for a in self.coeffs]
        return MatPoly(out, self.p, out[0].ring if out else getattr(self.ring, "base", self.ring))

    def __call__(self, x) -> Mat:
        acc = Mat.zeros(self.p, self.p, self.ring)
        for a in reversed(self.coeffs):
            acc = acc.scale(x) + a
        return acc

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coeffs)

    def max_abs(self):
        return max((a.max_abs() for a in self.coeffs), default=0)

    def as_column(self, length: int) -> Mat:
        """Coefficients stacked into a ``length p`` x ``p`` block column."""
        return Mat.from_blocks([[self.coeff(k)] for k in range(length)])

    def __eq__(self, other):
        if not isinstance(other, MatPoly):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return all(self.coeff(k) == other.coeff(k) for k in range(n))

    def __repr__(self):
        return f"MatPoly(p={self.p}, deg={self.degree}, {list(self.coeffs)!r})"


@dataclass
class PolyFamily:
    """Monic ``P_n = I x^n + sum_k xi[n][k] x^k`` with companion sequences.

    ``valid_through`` is the largest ``n`` for which ``H_0..H_n`` are
    invertible; polynomials are stored up to index ``top = valid_through + 1``
    (or the requested ``n_max + 1``).
    """

    p: int
    ring: Ring
    xi: list
    H: list
    V: list
    Z: list
    U: list
    valid_through: int
    requested: Optional[int]
    eta: Optional[list] = None
    table: Optional[MomentTable] = field(default=None, repr=False)
    measure: Optional[DiscreteMeasure] = field(default=None, repr=False)
    route: str = "moments"

    @property
    def top(self) -> int:
        return len(self.xi) - 1

    @property
    def status(self) -> str:
        if self.requested is not None and self.valid_through < self.requested:
            return f"partial: moment condition fails at n={self.valid_through + 1}"
        return "complete"

    @property
    def n_max(self) -> int:
        return self.valid_through if self.requested is None else min(self.valid_through, self.requested)

    def P(self, n: int) -> MatPoly:
        if n < 0:
            return MatPoly.zero(self.p, self.ring)
        return MatPoly(list(self.xi[n]) + [Mat.identity(self.p, self.ring)], self.p, self.ring)

    def Q(self, n: int) -> MatPoly:
        """Right-monic dual polynomial; ``P_n^T`` in the symmetric case."""
        if n < 0:
            return MatPoly.zero(self.p, self.ring)
        if self.eta is None:
            return self.P(n).T
        return MatPoly(list(self.eta[n]) + [Mat.identity(self.p, self.ring)], self.p, self.ring)

    def sub(self, n: int) -> Mat:
        """Subleading coefficient ``xi_{n,n-1}`` (zero for ``n <= 0``)."""
        if n <= 0:
            return Mat.zeros(self.p, self.p, self.ring)
        return self.xi[n][n - 1]

    def Hinv(self, n: int) -> Mat:
        return invert(self.H[n])


def _row(table: MomentTable, n: int) -> Mat:
    return Mat.from_blocks([[table.m[n][j] for j in range(n)]])


def _col(table: MomentTable, n: int, j: Optional[int] = None) -> Mat:
    """Block column ``(m_{0,j}, ..., m_{n-1,j})``, ``j = n`` by default."""
    j = n if j is None else j
    return Mat.from_blocks([[table.m[i][j]] for i in range(n)])


def build_family(table: MomentTable, n_max: Optional[int] = None, strict: bool = False,
                 asymmetric: Optional[bool] = None, measure: Optional[DiscreteMeasure] = None) -> PolyFamily:
    """Solve ``sum_k xi_{n,k} m_{k,j} + m_{n,j} = 0`` (``j < n``) for each ``n``.

    Stops at the first singular ``H_n``; with ``strict`` that raises
    :class:`MomentConditionViolated` when the request cannot be met.
    """
    p, ring = table.p, table.ring
    limit = table.order - 2
    if n_max is not None and n_max > limit:
        raise ValueError(f"moment table of order {table.order} supports n_max <= {limit}")
    target = limit if n_max is None else n_max
    if asymmetric is None:
        asymmetric = measure is not None and not measure.symmetric
    m, phi = table.m, table.phi
    xi, eta, H, V, Z, U = [], [], [], [], [], []
    valid = -1
    n = 0
    while True:
        if n == 0:
            row = []
            erow = []
        else:
            M = table.moment_matrix(n)
            sol = solve(M.T, -_row(table, n).T).T
            row = [sol.submatrix(range(p), range(k * p, (k + 1) * p)) for k in range(n)]
            if asymmetric:
                esol = solve(M, -_col(table, n))
                erow = esol.column_blocks(p)
        xi.append(row)
        if asymmetric:
            eta.append(erow)

        def combine(seq, shift):
            acc = seq(n + shift)
            for k, c in enumerate(row):
                acc = acc + c @ seq(k + shift)
            return acc

        H.append(combine(lambda k: m[k][n], 0))
        Z.append(combine(lambda k: m[k][n + 1], 0))
        V.append(combine(lambda k: phi[k], 0))
        U.append(combine(lambda k: phi[k], 1))
        if n > target:
            break
        if not is_invertible(H[n]):
            break
        valid = n
        n += 1
    if strict and valid < target:
        raise MomentConditionViolated(valid + 1)
    return PolyFamily(p, ring, xi, H, V, Z, U, valid, n_max, eta if asymmetric else None, table, measure)


def build_family_nodes(mu: DiscreteMeasure, table: MomentTable, n_max: Optional[int] = None,
                       strict: bool = False) -> PolyFamily:
    """Same family, built by Gram-Schmidt on node values instead of moment solves.

    ``P_{n+1} = x P_n - sum_j C_j P_j`` with ``C_j = <x P_n, P_j^T> H_j^{-1}``,
    applied twice per step.  Pairings are node double sums, so the
    ill-conditioned moment matrices never enter; this is the float default.
    Symmetric weights only.
    """
    if not mu.symmetric:
        raise ValueError("the node route needs symmetric weights")
    p, ring = mu.p, mu.ring
    target = len(mu.nodes) if n_max is None else n_max
    nodes = mu.deformed(1)
    xs = [x for x, _ in nodes]
    K = [[(wk @ wl).scale(1 / (xk + xl)) for xl, wl in nodes] for xk, wk in nodes]
    eye = Mat.identity(p, ring)
    zero = Mat.zeros(p, p, ring)

    def pair_vals(u, v):
        # sum_kl u_k K_kl v_l^T
        acc = zero
        for k, uk in enumerate(u):
            row = zero
            for l, vl in enumerate(v):
                row = row + K[k][l] @ vl.T
            acc = acc + uk @ row
        return acc

    def pair_power(u, j):
        acc = zero
        for k, uk in enumerate(u):
            for l, xl in enumerate(xs):
                acc = acc + (uk @ K[k][l]).scale(xl ** j)
        return acc

    vals = [[eye for _ in xs]]
    coeffs = [[eye]]
    xi, H, V, Z, U, Hinv = [], [], [], [], [], []
    valid = -1
    n = 0
    while True:
        if n > 0:
            v = [vk.scale(x) for vk, x in zip(vals[n - 1], xs)]
            c = [zero] + list(coeffs[n - 1])
            for _ in range(2):
                for j in range(n):
                    C = pair_vals(v, vals[j]) @ Hinv[j]
                    v = [a - C @ b for a, b in zip(v, vals[j])]
                    for k, cj in enumerate(coeffs[j]):
                        c[k] = c[k] - C @ cj
            c[n] = eye
            vals.append(v)
            coeffs.append(c)
        u = vals[n]
        xi.append(list(coeffs[n][:n]))
        H.append(pair_vals(u, vals[n]))
        Z.append(pair_power(u, n + 1))
        V.append(_node_sum(u, nodes, 0))
        U.append(_node_sum(u, nodes, 1))
        if n > target or not is_invertible(H[n]):
            break
        Hinv.append(invert(H[n]))
        valid = n
        n += 1
    if strict and valid < target:
        raise MomentConditionViolated(valid + 1)
    return PolyFamily(p, ring, xi, H, V, Z, U, valid, n_max, None, table, mu, route="nodes")


def _node_sum(vals, nodes, power):
    acc = None
    for v, (x, w) in zip(vals, nodes):
        t = (v @ w).scale(x ** power)
        acc = t if acc is None else acc + t
    return acc


def family_from_measure(mu: DiscreteMeasure, n_max: Optional[int] = None, strict: bool = False,
                        route: str = "auto") -> PolyFamily:
    """Build the family of ``mu``.

    ``route="moments"`` solves the moment systems (the exact default);
    ``"nodes"`` uses :func:`build_family_nodes`; ``"auto"`` picks the node
    route for float measures with symmetric weights.
    """
    if route not in ("auto", "moments", "nodes"):
        raise ValueError(f"unknown construction route {route!r}")
    order = (n_max if n_max is not None else len(mu.nodes)) + 2
    table = moments(mu, order)
    if route == "auto":
        route = "nodes" if (not mu.base.exact and mu.symmetric) else "moments"
    if route == "nodes":
        return build_family_nodes(mu, table, n_max, strict=strict)
    return build_family(table, n_max, strict=strict, measure=mu)


# -- quasideterminant route ------------------------------------------------

def _unit_col(n: int, i: int, p: int, ring: Ring) -> Mat:
    z, e = Mat.zeros(p, p, ring), Mat.identity(p, ring)
    return Mat.from_blocks([[e if k == i else z] for k in range(n)])


def qd_forms(table: MomentTable, n: int) -> dict:
    """``xi_{n,i}``, ``H_n``, ``V_n`` and ``Z_n`` from their quasideterminant expressions."""
    p, ring = table.p, table.ring
    m, phi = table.m, table.phi
    if n == 0:
        return {"xi": [], "H": m[0][0], "V": phi[0], "Z": m[0][1]}
    M = table.moment_matrix(n)
    r = _row(table, n)
    zero = Mat.zeros(p, p, ring)
    xi = [qdet([[M, _unit_col(n, i, p, ring)], [r, zero]]) for i in range(n)]
    H = qdet([[M, _col(table, n)], [r, m[n][n]]])
    V = qdet([[M, Mat.from_blocks([[phi[k]] for k in range(n)])], [r, phi[n]]])
    Z = qdet([[M, _col(table, n, n + 1)], [r, m[n][n + 1]]])
    return {"xi": xi, "H": H, "V": V, "Z": Z}


def qd_poly_at(table: MomentTable, n: int, x) -> Mat:
    """``P_n(x)`` as the quasideterminant with the monomial column ``(I, xI, ..., x^n I)``."""
    p, ring = table.p, table.ring
    col = [Mat.identity(p, ring).scale(x ** k) for k in range(n + 1)]
    if n == 0:
        return col[0]
    M = table.moment_matrix(n)
    return qdet([[M, Mat.from_blocks([[c] for c in col[:n]])], [_row(table, n), col[n]]])


def check_qd_route(F: PolyFamily, sample_x=None) -> ResidualReport:
    rep = ResidualReport("quasideterminant route vs linear solve")
    T = F.table
    for n in range(F.top + 1):
        if n > 0 and n - 1 > F.valid_through:
            break
        forms = qd_forms(T, n)
        for i, c in enumerate(forms["xi"]):
            rep.compare("qd_xi", n, c, F.xi[n][i])
        rep.compare("qd_H", n, forms["H"], F.H[n])
        rep.compare("qd_V", n, forms["V"], F.V[n])
        rep.compare("qd_Z", n, forms["Z"], F.Z[n])
        if sample_x is not None:
            rep.compare("qd_P", n, qd_poly_at(T, n, sample_x), F.P(n)(sample_x))
    return rep


# -- pairings and checks ----------------------------------------------------

def inner_product(f: MatPoly, g: MatPoly, mu: DiscreteMeasure) -> Mat:
    """``sum_{k,l} f(x_k) W_k(t) W_l(t) g(y_l) / (x_k + y_l)`` by direct node double sum."""
    ring = mu.ring
    acc = Mat.zeros(mu.p, mu.p, ring)
    left = [(x, f(x) @ w) for x, w in mu.deformed(1)]
    right = [(y, w @ g(y)) for y, w in mu.deformed(2)]
    for x, a in left:
        for y, b in right:
            acc = acc + (a @ b).scale(1 / (x + y))
    return acc


def single_sum(f: MatPoly, mu: DiscreteMeasure, side: int = 1, power: int = 0, right: bool = False) -> Mat:
    """``sum_k x_k^power f(x_k) W_k(t)`` (``W_k(t) g(x_k)`` when ``right``)."""
    acc = Mat.zeros(mu.p, mu.p, mu.ring)
    for x, w in mu.deformed(side):
        term = w @ f(x) if right else f(x) @ w
        acc = acc + term.scale(x ** power)
    return acc


def check_orthogonality(F: PolyFamily, mu: Optional[DiscreteMeasure] = None, n_top: Optional[int] = None) -> ResidualReport:
    """``<P_n, Q_m> = H_n delta_nm`` via the node double sum (``Q_m = P_m^T`` when symmetric)."""
    mu = mu or F.measure
    rep = ResidualReport("orthogonality")
    top = F.n_max if n_top is None else min(n_top, F.n_max)
    z = Mat.zeros(F.p, F.p, F.ring)
    for n in range(top + 1):
        for k in range(top + 1):
            val = inner_product(F.P(n), F.Q(k), mu)
            rep.compare("orthogonality", n, val, F.H[n] if n == k else z, scale=F.H[n].max_abs())
    return rep


def check_annihilation(F: PolyFamily) -> ResidualReport:
    """``<P_n, y^i I> = 0`` for ``i < n`` from the moment table."""
    rep = ResidualReport("annihilation")
    m = F.table.m
    for n in range(1, F.top + 1):
        for i in range(n):
            acc = m[n][i]
            for k, c in enumerate(F.xi[n]):
                acc = acc + c @ m[k][i]
            rep.zero("P_n_perp_y^i", n, acc, scale=m[n][i].max_abs())
    return rep


def check_structure(F: PolyFamily) -> ResidualReport:
    """``H_n = H_n^T`` and ``Z_n^T = -xi_{n+1,n} H_n`` (symmetric weights)."""
    rep = ResidualReport("family structure")
    for n in range(F.n_max + 1):
        rep.compare("H_symmetric", n, F.H[n], F.H[n].T)
        if n + 1 <= F.top:
            rep.compare("Z_transpose", n, F.Z[n].T, -(F.sub(n + 1) @ F.H[n]))
    return rep


def check_symmetry_lemma(F: PolyFamily) -> ResidualReport:
    """Rebuild the dual family from the transposed system and compare with ``P_n^T``."""
    rep = ResidualReport("symmetry lemma")
    mu = F.measure
    if mu is not None and not mu.symmetric:
        rep.skip("Q_transpose_eq_P", None, "asymmetric weights: lemma precondition W1 = W2 = W1^T not met")
        return rep
    dual = build_family(F.table, min(F.n_max, F.table.order - 2), asymmetric=True)
    for n in range(dual.top + 1):
        for k in range(n):
            rep.compare("Q_transpose_eq_P", n, dual.eta[n][k], F.xi[n][k].T)
    return rep


def check_xshift(F: PolyFamily, pairs=None, mu: Optional[DiscreteMeasure] = None) -> ResidualReport:
    """``<x f, g> + <f, y g> = (sum f W)(sum W g)`` for the given polynomial pairs."""
    mu = mu or F.measure
    rep = ResidualReport("x-shift")
    if pairs is None:
        pairs = [(F.P(n), F.Q(k)) for n in range(F.n_max + 1) for k in range(F.n_max + 1)]
    for idx, (f, g) in enumerate(pairs):
        lhs = inner_product(f.mul_x(), g, mu) + inner_product(f, g.mul_x(), mu)
        rhs = single_sum(f, mu, 1) @ single_sum(g, mu, 2, right=True)
        rep.compare("x_shift", idx, lhs, rhs)
    return rep
