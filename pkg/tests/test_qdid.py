import random
from fractions import Fraction

import pytest
import sympy

from mcbop import JQQ, Jet2, Mat, Singular, qdet
from mcbop.qdid import (_eval_homo_g, _eval_homo_h, _eval_ncj, check_derivative_formulas, check_homological,
                        check_nc_jacobi, rand_mat, rhs_general, rhs_grammian, rhs_row, run_identities)


def q(v):
    return Mat.scalar(Fraction(v))


def S(m):
    return sympy.Matrix(m.rows, m.cols, [sympy.Rational(v.numerator, v.denominator) for v in m.entries])


def scalar_blocks(rng):
    names = "ABCDEfghi"
    return {k: Mat.scalar(Fraction(rng.randint(-5, 5), rng.randint(1, 4))) for k in names}


def full(b):
    return Mat.from_blocks([[b["A"], b["B"], b["C"]], [b["D"], b["f"], b["g"]], [b["E"], b["h"], b["i"]]])


def det_ratio(M, i, j):
    """(-1)^{i+j} det M / det M^{ij} for commuting entries."""
    minor = M.copy()
    minor.row_del(i)
    minor.col_del(j)
    return (-1) ** (i + j) * M.det() / minor.det()


def defined_draw(rng, evaluate):
    """Redraw scalar blocks until every inverse the identity needs exists."""
    while True:
        b = scalar_blocks(rng)
        try:
            return b, evaluate(b)
        except Singular:
            continue


@pytest.mark.parametrize("seed", range(10))
def test_ncj_scalar_matches_determinants(seed):
    b, (lhs, rhs) = defined_draw(random.Random(seed), _eval_ncj)
    assert lhs == rhs
    assert S(lhs)[0, 0] == det_ratio(S(full(b)), 2, 2)


def test_ncj_identity_blocks():
    rng = random.Random(1)
    p = 2
    z = Mat.zeros(p, p)
    f, g, h, i = (rand_mat(rng, p, p) for _ in range(4))
    while f.rows and S(f).det() == 0:
        f = rand_mat(rng, p, p)
    b = {"A": Mat.identity(p), "B": z, "C": z, "D": z, "E": z, "f": f, "g": z, "h": h, "i": i}
    lhs, rhs = _eval_ncj(b)
    assert lhs == rhs == i


@pytest.mark.parametrize("seed", range(6))
def test_homological_scalar_matches_determinants(seed):
    rng = random.Random(100 + seed)
    b, (lh, rh) = defined_draw(rng, _eval_homo_h)
    assert lh == rh
    assert S(lh)[0, 0] == det_ratio(S(full(b)), 2, 1)
    b, (lg, rg) = defined_draw(rng, _eval_homo_g)
    assert lg == rg
    assert S(lg)[0, 0] == det_ratio(S(full(b)), 1, 2)


def test_homological_right_factor_shape():
    # with A empty the factor boxed at the zero of the row (0, I) is -g^{-1} f
    p = 1
    e = Mat(0, 0, ())
    f, g = q(2), q(3)
    right = qdet([[e, Mat(0, p, ()), Mat(0, p, ())], [Mat(p, 0, ()), f, g], [Mat(p, 0, ()), q(0), q(1)]], 2, 1)
    assert right == q(Fraction(-2, 3))


@pytest.mark.parametrize("p", [1, 2])
def test_random_block_identities(p):
    assert check_nc_jacobi(50, p, seed=3).failures == 0
    for rep in check_homological(50, p, seed=3):
        assert rep.failures == 0 and rep.trials == 50


def test_constant_jets_have_zero_derivative():
    rng = random.Random(2)
    while True:
        A = rand_mat(rng, 2, 2)
        if S(A).det() != 0:
            break
    b = {"A": A.to_ring(JQQ), "B": rand_mat(rng, 2, 1).to_ring(JQQ), "C": rand_mat(rng, 1, 2).to_ring(JQQ),
         "d": rand_mat(rng, 1, 1).to_ring(JQQ)}
    assert qdet([[b["A"], b["B"]], [b["C"], b["d"]]]).d == q(0)
    assert rhs_general(b) == q(0)
    assert rhs_row(b) == q(0)


def test_2x2_product_rule():
    # d/dt (d - c a^{-1} b) = d' - c' b/a - c b'/a + c b a'/a^2
    a, b_, c, d = Jet2(Fraction(2), 1), Jet2(Fraction(3), -1), Jet2(Fraction(-1), 2), Jet2(Fraction(5), 4)
    blocks = {k: Mat(1, 1, (v,), JQQ) for k, v in zip("ABCd", (a, b_, c, d))}
    by_hand = d.c1 - c.c1 * b_.c0 / a.c0 - c.c0 * b_.c1 / a.c0 + c.c0 * b_.c0 * a.c1 / a.c0 ** 2
    assert qdet([[blocks["A"], blocks["B"]], [blocks["C"], blocks["d"]]]).d == q(by_hand)
    assert rhs_general(blocks) == q(by_hand)


def test_grammian_rank_one():
    rng = random.Random(8)
    E, F = rand_mat(rng, 2, 1), rand_mat(rng, 1, 2)
    while True:
        A0 = rand_mat(rng, 2, 2)
        if S(A0).det() != 0:
            break
    A = Mat.from_parts(A0, E @ F)
    b = {"A": A, "B": rand_mat(rng, 2, 1, JQQ), "C": rand_mat(rng, 1, 2, JQQ), "d": rand_mat(rng, 1, 1, JQQ)}
    assert rhs_grammian(b, [(E, F)]) == qdet([[b["A"], b["B"]], [b["C"], b["d"]]]).d


@pytest.mark.parametrize("family", ["general", "grammian", "row", "column", "agree"])
def test_derivative_families(family):
    rep = check_derivative_formulas(family, trials=30, p=2, seed=5)
    assert rep.failures == 0 and rep.trials == 30


def test_reports_are_deterministic_and_counted():
    a = run_identities("homo", trials=20, p=2, seed=7)
    b = run_identities("homo", trials=20, p=2, seed=7)
    assert [r.to_json() for r in a] == [r.to_json() for r in b]
    for r in a:
        assert sum(r.shapes.values()) == r.trials
        assert set(r.shapes) <= {2, 3, 4}


def test_singular_draws_are_resampled():
    rep = check_nc_jacobi(100, 1, seed=0)
    assert rep.trials == 100
    # scalar draws with zero entries are frequent enough to hit singular corners
    assert rep.resampled > 0


def test_failure_records_counterexample(monkeypatch):
    from mcbop import qdid

    monkeypatch.setitem(qdid._DQD, "dqd", (False, lambda b: (q(0), q(1))))
    rep = check_derivative_formulas("general", trials=3, p=1, seed=0)
    assert rep.failures == 3
    assert rep.counterexample is not None
    assert rep.to_json()["status"] == "fail"


def test_unknown_groups():
    with pytest.raises(ValueError):
        run_identities("nope")
    with pytest.raises(ValueError):
        check_derivative_formulas("diagonal")
