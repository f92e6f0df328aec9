"""Measure generators and brute-force oracles shared by the tests."""
import random
from fractions import Fraction

from mcbop import Mat, simple_measure

TWO_NODE = ([1, 2], [1, 1])
SIX_NODE = ([1, 2, 3, 4, 5, 6], [1, 2, 1, 3, 1, 2])


def pd_weight(rng, p):
    """Random symmetric positive definite integer matrix, ``L L^T + I``."""
    L = [[rng.randint(-2, 2) if j <= i else 0 for j in range(p)] for i in range(p)]
    rows = [[sum(L[i][k] * L[j][k] for k in range(p)) + (1 if i == j else 0) for j in range(p)]
            for i in range(p)]
    return Mat.from_rows(rows)


def random_measure(seed, p=None, nodes=None, flow="t1", max_x=6):
    """Seeded PD measure with distinct small rational points."""
    rng = random.Random(seed)
    p = p or rng.choice([1, 2])
    count = nodes or rng.randint(4, 6)
    pool = sorted({Fraction(rng.randint(1, 4 * max_x), rng.choice([1, 2, 4])) for _ in range(40)})
    xs = rng.sample(pool, count)
    ws = [pd_weight(rng, p) for _ in xs]
    return simple_measure(xs, ws, p=p, flow=flow)


def scalar_measure(seed, nodes=None, flow="t1"):
    rng = random.Random(seed)
    count = nodes or rng.randint(3, 6)
    xs = rng.sample(range(1, 13), count)
    ws = [rng.randint(1, 5) for _ in xs]
    return simple_measure(xs, ws, flow=flow)


def brute_moment(points, weights, i, j):
    """Independent double-sum oracle for scalar moments."""
    return sum(Fraction(x) ** i * Fraction(y) ** j * w * v / (Fraction(x) + Fraction(y))
               for x, w in zip(points, weights) for y, v in zip(points, weights))



def symbolic_moments(points, weights, order, power=1):
    """``m_ij(t)`` and ``phi_i(t)`` as sympy expressions in ``t`` (flow factor ``exp(t x^power)``)."""
    import sympy

    t = sympy.Symbol("t")
    pts = [sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in points]
    ws = [sympy.Rational(Fraction(w).numerator, Fraction(w).denominator) * sympy.exp(t * x ** power)
          for x, w in zip(pts, weights)]
    m = [[sum(x ** i * y ** j * wx * wy / (x + y) for x, wx in zip(pts, ws) for y, wy in zip(pts, ws))
          for j in range(order + 1)] for i in range(order + 1)]
    phi = [sum(x ** i * w for x, w in zip(pts, ws)) for i in range(order + 1)]
    return t, m, phi


def at0(expr, t, k=0):
    """``k``-th t-derivative at 0 as a Fraction."""
    import sympy

    v = sympy.simplify(sympy.diff(expr, t, k).subs(t, 0))
    v = sympy.Rational(v)
    return Fraction(int(v.p), int(v.q))
