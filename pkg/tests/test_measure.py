import json
import math
from fractions import Fraction

import numpy as np
import pytest
from helpers import TWO_NODE, brute_moment, random_measure
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import beta, gamma

from mcbop import JQQ, Jet2, Mat, MeasureParseError, UnsupportedFamily, discretize, load_measure, moments, simple_measure
from mcbop.measure import DiscreteMeasure, is_positive_definite, measure_from_dict, measure_to_dict, moment_condition_check


def scalar(m):
    return m[0, 0]


def test_two_node_moments_match_double_sum():
    T = moments(simple_measure(*TWO_NODE), 3)
    assert scalar(T.m[0][0]) == Fraction(17, 12)
    assert scalar(T.m[1][0]) == scalar(T.m[0][1]) == 2
    assert scalar(T.m[1][1]) == Fraction(17, 6)
    assert [scalar(T.phi[i]) for i in range(3)] == [2, 3, 5]
    for i in range(4):
        for j in range(4):
            assert scalar(T.m[i][j]) == brute_moment(*TWO_NODE, i, j)


def test_single_node_moments_are_half():
    T = moments(simple_measure([1], [1]), 3)
    assert all(scalar(x) == Fraction(1, 2) for row in T.m for x in row)


def test_two_node_t1_jet():
    T = moments(simple_measure(*TWO_NODE, flow="t1"), 2)
    assert scalar(T.m[0][0]) == Jet2(Fraction(17, 12), 4, 6)


def test_t3_jet_by_double_sum():
    mu = simple_measure(*TWO_NODE, flow="t3")
    T = moments(mu, 2)
    pts, wts = TWO_NODE
    d = sum(Fraction(w * v * (x ** 3 + y ** 3), x + y) for x, w in zip(pts, wts) for y, v in zip(pts, wts))
    assert scalar(T.m[0][0]).c1 == d


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_kernel_identity_and_symmetry(seed):
    mu = random_measure(seed, flow=None)
    T = moments(mu, 4)
    for i in range(4):
        for j in range(4):
            assert T.m[i + 1][j] + T.m[i][j + 1] == T.phi[i] @ T.phi[j]
            assert T.m[i][j].T == T.m[j][i]


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_jet_derivative_is_shifted_moment(seed):
    mu = random_measure(seed)
    plain = moments(mu.with_flow(None), 6)
    t1 = moments(mu, 3)
    t3 = moments(mu.with_flow("t3"), 3)
    for i in range(4):
        for j in range(4):
            assert t1.m[i][j].d == plain.m[i + 1][j] + plain.m[i][j + 1]
            assert t3.m[i][j].d == plain.m[i + 3][j] + plain.m[i][j + 3]
            assert t1.m[i][j].value == plain.m[i][j]


def test_asymmetric_moments_have_no_symmetry():
    one = Mat.identity(1)
    mu = DiscreteMeasure(p=1, nodes=((Fraction(1), one), (Fraction(2), one.scale(3))),
                         nodes2=((Fraction(1, 2), one), (Fraction(3), one)))
    T = moments(mu, 2)
    assert T.m[1][0] != T.m[0][1]
    expected = sum(Fraction(w, x + y) * x for x, w in ((1, 1), (2, 3)) for y in (Fraction(1, 2), 3))
    assert scalar(T.m[1][0]) == expected
    # the x-shift identity still holds, with psi on the second side
    assert T.m[1][0] + T.m[0][1] == T.phi[0] @ T.psi[0]


@pytest.mark.parametrize("points, weights, valid", [
    ([1], [1], 0),
    (TWO_NODE[0], TWO_NODE[1], 1),
    ([1, 2, 3, 5], [1, 2, 1, 1], 3),
])
def test_moment_condition(points, weights, valid):
    T = moments(simple_measure(points, weights), len(points) + 1)
    assert moment_condition_check(T)["valid_through"] == valid


def test_moment_condition_pd_matrix_measure():
    mu = random_measure(11, p=2, nodes=5, flow=None)
    # block rank of the moment matrix is N p, so block minors are invertible through N-1
    T = moments(mu, 6)
    assert moment_condition_check(T)["valid_through"] == 4


def test_laguerre_one_node():
    mu = discretize("laguerre", {"alpha": 0}, 1)
    (x, w), = mu.nodes
    assert x == pytest.approx(1.0)
    assert w[0, 0] == pytest.approx(1.0)


def test_laguerre_two_nodes_against_roots():
    mu = discretize("laguerre", {"alpha": 0}, 2)
    xs = sorted(x for x, _ in mu.nodes)
    assert xs == pytest.approx([2 - math.sqrt(2), 2 + math.sqrt(2)])
    # w_i = x_i / ((n+1) L_{n+1}(x_i))^2 with L_3
    L3 = np.polynomial.laguerre.Laguerre([0, 0, 0, 1])
    ws = sorted((x, w[0, 0]) for x, w in mu.nodes)
    for x, w in ws:
        assert w == pytest.approx(x / (3 * L3(x)) ** 2)
    assert sum(w for _, w in ws) == pytest.approx(1.0)


def test_laguerre_matches_numpy_rule():
    mu = discretize("laguerre", {"alpha": 0}, 12)
    xs, ws = np.polynomial.laguerre.laggauss(12)
    assert [x for x, _ in mu.nodes] == pytest.approx(list(xs))
    assert [w[0, 0] for _, w in mu.nodes] == pytest.approx(list(ws))


def test_scaled_exponential():
    mu = discretize("scaled-exponential", {"rate": 2}, 8)
    # int e^{-2x} x dx = 1/4
    assert sum(x * w[0, 0] for x, w in mu.nodes) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        discretize("scaled-exponential", {"rate": -1}, 4)


def test_unsupported_family():
    with pytest.raises(UnsupportedFamily):
        discretize("hermite", {}, 4)


def _closed_form(i, j, a):
    # int int x^{i+a} y^{j+a} e^{-x-y} / (x + y): substitute x = s u, y = s (1 - u)
    return gamma(i + j + 2 * a + 1) * beta(i + a + 1, j + a + 1)


def _max_rel_error(alpha, count, top=6):
    T = moments(discretize("laguerre", {"alpha": alpha}, count), top)
    return max(abs(T.m[i][j][0, 0] - _closed_form(i, j, alpha)) / _closed_form(i, j, alpha)
               for i in range(top + 1) for j in range(top + 1) if i + j <= top)


@pytest.mark.parametrize("alpha", [0, 1, 2, 3])
def test_quadrature_converges_to_closed_form(alpha):
    # the kernel 1/(x+y) is singular at the corner, so the rate is algebraic,
    # about N^-(2 alpha + 1), not spectral
    e16, e32, e64 = (_max_rel_error(alpha, n) for n in (16, 32, 64))
    assert e16 > e32 > e64
    order = math.log2(e32 / e64)
    assert order > 2 * alpha + 0.5


@pytest.mark.xfail(strict=True, reason="corner singularity limits Gauss-Laguerre to algebraic convergence")
def test_quadrature_self_convergence_16_vs_32():
    worst = 0.0
    for alpha in (0, 1, 2):
        a = moments(discretize("laguerre", {"alpha": alpha}, 16), 6)
        b = moments(discretize("laguerre", {"alpha": alpha}, 32), 6)
        for i in range(7):
            for j in range(7 - i):
                x, y = a.m[i][j][0, 0], b.m[i][j][0, 0]
                worst = max(worst, abs(x - y) / abs(y))
    assert worst < 1e-10


def test_matrix_weight_family():
    W = Mat.from_rows([[2, 1], [1, 1]])
    mu = discretize("laguerre", {"alpha": 1}, 4, p=2, weight=W)
    x, w = mu.nodes[0]
    assert w[0, 1] == pytest.approx(w[1, 1])
    assert w[0, 0] == pytest.approx(2 * w[1, 1])


def test_json_round_trip(tmp_path):
    mu = random_measure(4, p=2, flow="t3")
    path = tmp_path / "m.json"
    path.write_text(json.dumps(measure_to_dict(mu)))
    back = load_measure(path)
    assert back == mu


@pytest.mark.parametrize("data, fragment", [
    ({"p": 1}, "nodes"),
    ({"p": 0, "nodes": []}, "p"),
    ({"p": 1, "nodes": [{"x": "1.5", "W": [["1"]]}]}, "nodes[0].x"),
    ({"p": 1, "nodes": [{"x": "1", "W": [["1", "2"]]}]}, "nodes[0].W"),
    ({"p": 1, "nodes": [{"x": "-1", "W": [["1"]]}]}, "not positive"),
    ({"p": 1, "nodes": [{"x": "1", "W": [["1"]]}, {"x": "1", "W": [["2"]]}]}, "distinct"),
    ({"p": 2, "nodes": [{"x": "1", "W": [["1", "2"], ["0", "1"]]}]}, "not symmetric"),
    ({"p": 1, "flow": "t2", "nodes": []}, "flow"),
    ({"p": 1, "family": {"name": "hermite"}}, "family.name"),
])
def test_parse_errors_name_the_field(data, fragment):
    with pytest.raises(MeasureParseError, match=fragment.replace("[", r"\[").replace("]", r"\]")):
        measure_from_dict(data)


def test_json_syntax_error_has_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"p": 1,\n "nodes": [}')
    with pytest.raises(MeasureParseError, match="line 2 column"):
        load_measure(path)


def test_positive_definite_check():
    assert is_positive_definite(Mat.from_rows([[2, 1], [1, 1]]))
    assert not is_positive_definite(Mat.from_rows([[1, 2], [2, 1]]))
    assert not is_positive_definite(Mat.from_rows([[1, 0], [1, 1]]))
    mu = simple_measure([1], [[[1, 2], [2, 1]]])
    with pytest.raises(MeasureParseError):
        mu.validate(require_pd=True)


def test_flow_changes_ring_only():
    mu = simple_measure(*TWO_NODE)
    assert mu.ring.exact and not mu.ring.is_jet
    assert mu.with_flow("t1").ring is JQQ
    with pytest.raises(ValueError):
        mu.with_flow("t5")


def test_random_measures_are_reproducible():
    assert random_measure(9) == random_measure(9)
    assert random_measure(9) != random_measure(10)
