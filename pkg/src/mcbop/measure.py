"""Matrix point-mass measures on the positive half line and their moments."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .blockmat import Mat, is_invertible
from .errors import MeasureParseError, UnsupportedFamily
from .ring import QQ, RR, Ring, exp_node, jet_ring, parse_rational

FLOWS = (None, "t1", "t3")


def _leading_pivots(w: Mat) -> list:
    """Pivots of unpivoted elimination; their prefix products are the leading minors."""
    a = w.row_lists()
    n = len(a)
    piv = []
    for k in range(n):
        d = a[k][k]
        piv.append(d)
        if d == 0:
            break
        for i in range(k + 1, n):
            f = a[i][k] / d
            for j in range(k, n):
                a[i][j] = a[i][j] - f * a[k][j]
    return piv


def is_positive_definite(w: Mat) -> bool:
    if w != w.T:
        return False
    piv = _leading_pivots(w)
    return len(piv) == w.rows and all(d > 0 for d in piv)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite sum of matrix-weighted point masses ``sum_k W_k delta_{x_k}``.

    ``nodes2`` (if given) is an independent second measure for the ``y``
    variable; otherwise the pairing is symmetric with ``W_1 = W_2``.
    ``flow`` selects the active jet direction: ``t1`` deforms each weight by
    ``exp(t x)``, ``t3`` by ``exp(t x^3)``.
    """

    p: int
    nodes: tuple
    nodes2: Optional[tuple] = None
    flow: Optional[str] = None
    base: Ring = QQ
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.flow not in FLOWS:
            raise ValueError(f"unknown flow {self.flow!r}")

    @property
    def symmetric(self) -> bool:
        return self.nodes2 is None

    @property
    def ring(self) -> Ring:
        """Scalar ring of the moments: jets when a flow is active."""
        return jet_ring(self.base) if self.flow else self.base

    def with_flow(self, flow: Optional[str]) -> "DiscreteMeasure":
        return replace(self, flow=flow)

    def to_base(self, base: Ring) -> "DiscreteMeasure":
        """Re-express the node data over another base ring (e.g. floats)."""
        def conv(nodes):
            return tuple((base(x), w.to_ring(base)) for x, w in nodes)

        return replace(
            self,
            nodes=conv(self.nodes),
            nodes2=None if self.nodes2 is None else conv(self.nodes2),
            base=base,
        )

    def scaled(self, c) -> "DiscreteMeasure":
        def conv(nodes):
            return tuple((x, w.scale(c)) for x, w in nodes)

        return replace(self, nodes=conv(self.nodes), nodes2=None if self.nodes2 is None else conv(self.nodes2))

    def factor(self, x):
        if self.flow == "t1":
            return exp_node(x)
        if self.flow == "t3":
            return exp_node(x * x * x)
        return None

    def deformed(self, side: int = 1) -> list:
        """``[(x_k, W_k(t))]`` with the flow factor folded into the weight."""
        nodes = self.nodes if side == 1 or self.nodes2 is None else self.nodes2
        out = []
        ring = self.ring
        for x, w in nodes:
            f = self.factor(x)
            out.append((x, w.to_ring(ring) if f is None else w.scale(f)))
        return out

    def validate(self, require_pd: bool = False) -> None:
        for side, nodes in ((1, self.nodes), (2, self.nodes2)):
            if nodes is None:
                continue
            if not nodes:
                raise MeasureParseError(f"nodes{'' if side == 1 else '2'}: empty node list")
            xs = [x for x, _ in nodes]
            for k, (x, w) in enumerate(nodes):
                if not x > 0:
                    raise MeasureParseError(f"node {k}: support point {x} is not positive")
                if w.shape != (self.p, self.p):
                    raise MeasureParseError(f"node {k}: weight is {w.rows}x{w.cols}, expected {self.p}x{self.p}")
                if self.symmetric and w != w.T:
                    raise MeasureParseError(f"node {k}: weight is not symmetric")
                if require_pd and not is_positive_definite(w):
                    raise MeasureParseError(f"node {k}: weight is not positive definite")
            if len(set(xs)) != len(xs):
                raise MeasureParseError("support points are not pairwise distinct")


@dataclass(frozen=True)
class MomentTable:
    """Block moments ``m[i][j]`` and single moments ``phi[i]`` (``psi`` for side 2)."""

    order: int
    p: int
    ring: Ring
    m: tuple
    phi: tuple
    psi: tuple

    def mij(self, i: int, j: int) -> Mat:
        return self.m[i][j]

    def moment_matrix(self, n: int) -> Mat:
        """``(m_ij)`` for ``0 <= i, j < n`` as an ``n p`` square matrix."""
        return Mat.from_blocks([[self.m[i][j] for j in range(n)] for i in range(n)]) if n else Mat(0, 0, (), self.ring)


def moments(mu: DiscreteMeasure, order: int) -> MomentTable:
    """``m_ij = sum_{k,l} x_k^i y_l^j W_k(t) W_l(t) / (x_k + y_l)`` and ``phi_i = sum_k x_k^i W_k(t)``."""
    ring = mu.ring
    side1 = mu.deformed(1)
    side2 = mu.deformed(2)
    p = mu.p
    zero = Mat.zeros(p, p, ring)
    # R[k][j] = sum_l y_l^j W_l(t) / (x_k + y_l)
    R = []
    for xk, _ in side1:
        row = []
        for j in range(order + 1):
            acc = zero
            for yl, wl in side2:
                acc = acc + wl.scale(yl ** j / (xk + yl))
            row.append(acc)
        R.append(row)
    m = []
    for i in range(order + 1):
        mrow = []
        for j in range(order + 1):
            acc = zero
            for k, (xk, wk) in enumerate(side1):
                acc = acc + (wk @ R[k][j]).scale(xk ** i)
            mrow.append(acc)
        m.append(tuple(mrow))

    def single(side):
        out = []
        for i in range(order + 1):
            acc = zero
            for x, w in side:
                acc = acc + w.scale(x ** i)
            out.append(acc)
        return tuple(out)

    phi = single(side1)
    psi = phi if mu.symmetric else single(side2)
    return MomentTable(order, p, ring, tuple(m), phi, psi)


def moment_condition_check(table: MomentTable, n_max: Optional[int] = None, V: Optional[Sequence[Mat]] = None) -> dict:
    """Largest ``n`` with every leading block minor ``(m_ij)_{i,j<=k}``, ``k <= n``, invertible.

    ``valid_through = -1`` means even ``m_00`` is singular.
    """
    limit = table.order if n_max is None else min(n_max, table.order)
    valid = -1
    for k in range(limit + 1):
        if not is_invertible(table.moment_matrix(k + 1)):
            break
        valid = k
    report = {"valid_through": valid, "checked_through": limit}
    if V is not None:
        report["V_invertible"] = [is_invertible(v) for v in V]
    return report


# -- continuous families -------------------------------------------------

def discretize(family: str, params: Optional[dict] = None, count: int = 16, p: int = 1, weight: Optional[Mat] = None) -> DiscreteMeasure:
    """Gauss-type discretization of a named weight into point masses (floats).

    ``laguerre``: ``x^alpha e^{-x}``; ``scaled-exponential``: ``e^{-rate x}``.
    The scalar weight multiplies the constant symmetric matrix ``weight``
    (identity by default).
    """
    from scipy.special import roots_genlaguerre, roots_laguerre

    params = dict(params or {})
    w0 = (weight or Mat.identity(p, RR)).to_ring(RR)
    if w0.shape != (p, p):
        raise ValueError("matrix factor has wrong size")
    if family == "laguerre":
        alpha = float(params.get("alpha", 0.0))
        xs, ws = roots_genlaguerre(count, alpha)
    elif family == "scaled-exponential":
        rate = float(params.get("rate", 1.0))
        if rate <= 0:
            raise ValueError("rate must be positive")
        xs, ws = roots_laguerre(count)
        xs, ws = xs / rate, ws / rate
    else:
        raise UnsupportedFamily(f"unsupported weight family {family!r}")
    nodes = tuple((float(x), w0.scale(float(w))) for x, w in zip(xs, ws))
    return DiscreteMeasure(p=p, nodes=nodes, base=RR, label=f"{family}{params}")


# -- JSON ------------------------------------------------------------------

def _parse_nodes(raw, p, where):
    if not isinstance(raw, list):
        raise MeasureParseError(f"{where}: expected a list")
    nodes = []
    for k, node in enumerate(raw):
        loc = f"{where}[{k}]"
        if not isinstance(node, dict) or "x" not in node or "W" not in node:
            raise MeasureParseError(f"{loc}: expected an object with 'x' and 'W'")
        try:
            x = parse_rational(node["x"])
        except ValueError as exc:
            raise MeasureParseError(f"{loc}.x: {exc}") from None
        w = node["W"]
        if not isinstance(w, list) or len(w) != p or any(not isinstance(r, list) or len(r) != p for r in w):
            raise MeasureParseError(f"{loc}.W: expected a {p}x{p} array of rational strings")
        try:
            rows = [[parse_rational(v) for v in r] for r in w]
        except ValueError as exc:
            raise MeasureParseError(f"{loc}.W: {exc}") from None
        nodes.append((x, Mat.from_rows(rows, QQ)))
    return tuple(nodes)


def measure_from_dict(data: dict) -> DiscreteMeasure:
    if not isinstance(data, dict):
        raise MeasureParseError("top level: expected an object")
    p = data.get("p", 1)
    if not isinstance(p, int) or isinstance(p, bool) or p < 1:
        raise MeasureParseError("p: expected a positive integer")
    flow = data.get("flow")
    if flow not in FLOWS:
        raise MeasureParseError(f"flow: expected 't1', 't3' or null, got {flow!r}")
    if "family" in data:
        fam = data["family"]
        if not isinstance(fam, dict) or "name" not in fam:
            raise MeasureParseError("family: expected an object with 'name'")
        weight = None
        if "W" in fam:
            weight = Mat.from_rows([[parse_rational(v) for v in r] for r in fam["W"]], QQ).to_ring(RR)
        params = {k: v for k, v in fam.items() if k not in ("name", "count", "W")}
        try:
            mu = discretize(fam["name"], params, int(fam.get("count", 16)), p, weight)
        except UnsupportedFamily as exc:
            raise MeasureParseError(f"family.name: {exc}") from None
        return replace(mu, flow=flow)
    if "nodes" not in data:
        raise MeasureParseError("nodes: missing")
    nodes = _parse_nodes(data["nodes"], p, "nodes")
    nodes2 = _parse_nodes(data["nodes2"], p, "nodes2") if data.get("nodes2") is not None else None
    mu = DiscreteMeasure(p=p, nodes=nodes, nodes2=nodes2, flow=flow)
    mu.validate()
    return mu


def is_quadrature(data: dict) -> bool:
    return isinstance(data, dict) and "family" in data


def load_measure(path) -> DiscreteMeasure:
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeasureParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return measure_from_dict(data)


def measure_to_dict(mu: DiscreteMeasure) -> dict:
    def dump(nodes):
        return [{"x": mu.base.to_json(x), "W": w.to_json()} for x, w in nodes]

    out = {"p": mu.p, "nodes": dump(mu.nodes), "flow": mu.flow}
    if mu.nodes2 is not None:
        out["nodes2"] = dump(mu.nodes2)
    return out


def simple_measure(points: Sequence, weights: Sequence, p: Optional[int] = None, flow=None) -> DiscreteMeasure:
    """Build an exact measure from python numbers / nested lists (test and CLI helper)."""
    nodes = []
    for x, w in zip(points, weights):
        if isinstance(w, Mat):
            m = w
        elif isinstance(w, (list, tuple)):
            m = Mat.from_rows(w, QQ)
        else:
            m = Mat.scalar(w, QQ)
        nodes.append((QQ(x), m))
    p = p or nodes[0][1].rows
    return DiscreteMeasure(p=p, nodes=tuple(nodes), flow=flow)
