"""Randomized exact checks of the standard quasideterminant identities.

Every identity is evaluated on random rational (or jet) blocks and compared
to exact zero.  Draws that make some required inverse undefined are
resampled and counted, never skipped silently.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .blockmat import Mat, invert, qdet
from .errors import Singular
from .ring import JQQ, QQ, Jet2

IDENTITIES = ("ncj", "homo_h", "homo_g", "dqd", "dqd1", "dqd2", "dqd3", "dqd_agree")
GROUPS = {
    "ncj": ("ncj",),
    "homo": ("homo_h", "homo_g"),
    "dqd": ("dqd", "dqd1", "dqd2", "dqd3", "dqd_agree"),
}
MAX_RESAMPLES = 1000


@dataclass
class IdentityReport:
    identity: str
    p: int
    trials: int = 0
    failures: int = 0
    resampled: int = 0
    counterexample: Optional[dict] = None
    elapsed: float = 0.0
    shapes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        out = {
            "identity": self.identity,
            "p": self.p,
            "trials": self.trials,
            "failures": self.failures,
            "resampled": self.resampled,
            "shapes": {str(k): v for k, v in sorted(self.shapes.items())},
            "status": "pass" if self.ok else "fail",
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def rand_q(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-3, 3), rng.randint(1, 3))


def rand_mat(rng, rows, cols, ring=QQ) -> Mat:
    if ring is JQQ:
        vals = (Jet2(rand_q(rng), rand_q(rng), rand_q(rng)) for _ in range(rows * cols))
    else:
        vals = (rand_q(rng) for _ in range(rows * cols))
    return Mat(rows, cols, vals, ring)


def _dump(blocks: dict) -> dict:
    return {k: v.to_json() for k, v in blocks.items()}


def _run(identity, p, trials, seed, draw, evaluate) -> IdentityReport:
    """Draw until ``trials`` well-defined instances were evaluated."""
    rng = random.Random(f"{identity}:{p}:{seed}")
    rep = IdentityReport(identity, p)
    t0 = time.perf_counter()
    while rep.trials < trials:
        blocks, shape = draw(rng)
        try:
            lhs, rhs = evaluate(blocks)
        except Singular:
            rep.resampled += 1
            if rep.resampled > MAX_RESAMPLES * max(trials, 1):
                raise RuntimeError(f"{identity}: too many singular draws")
            continue
        rep.trials += 1
        rep.shapes[shape] = rep.shapes.get(shape, 0) + 1
        if lhs != rhs:
            rep.failures += 1
            if rep.counterexample is None:
                rep.counterexample = _dump(blocks)
    rep.elapsed = time.perf_counter() - t0
    return rep


# -- noncommutative Jacobi and homological relations -----------------------

def _draw_3x3(p):
    """Blocks of ``[[A, B, C], [D, f, g], [E, h, i]]`` with ``A`` of 0..2 block rows."""

    def draw(rng):
        k = rng.randint(0, 2) * p
        b = {
            "A": rand_mat(rng, k, k),
            "B": rand_mat(rng, k, p),
            "C": rand_mat(rng, k, p),
            "D": rand_mat(rng, p, k),
            "E": rand_mat(rng, p, k),
        }
        for name in "fghi":
            b[name] = rand_mat(rng, p, p)
        return b, k // p + 2

    return draw


def _require_invertible(m: Mat):
    if m.rows:
        invert(m)


def _eval_ncj(b):
    A, B, C, D, E = b["A"], b["B"], b["C"], b["D"], b["E"]
    f, g, h, i = b["f"], b["g"], b["h"], b["i"]
    _require_invertible(A)
    lhs = qdet([[A, B, C], [D, f, g], [E, h, i]])
    rhs = qdet([[A, C], [E, i]]) - qdet([[A, B], [E, h]]) @ invert(qdet([[A, B], [D, f]])) @ qdet([[A, C], [D, g]])
    return lhs, rhs


def _eval_homo_h(b):
    A, B, C, D, E = b["A"], b["B"], b["C"], b["D"], b["E"]
    f, g, h, i = b["f"], b["g"], b["h"], b["i"]
    p = f.rows
    z, eye = Mat.zeros(p, p), Mat.identity(p)
    lhs = qdet([[A, B, C], [D, f, g], [E, h, i]], 2, 1)
    right = qdet([[A, B, C], [D, f, g], [Mat.zeros(p, A.cols), z, eye]], 2, 1)
    rhs = qdet([[A, B, C], [D, f, g], [E, h, i]]) @ right
    return lhs, rhs


def _eval_homo_g(b):
    A, B, C, D, E = b["A"], b["B"], b["C"], b["D"], b["E"]
    f, g, h, i = b["f"], b["g"], b["h"], b["i"]
    p = f.rows
    z, eye = Mat.zeros(p, p), Mat.identity(p)
    lhs = qdet([[A, B, C], [D, f, g], [E, h, i]], 1, 2)
    left = qdet([[A, B, Mat.zeros(A.rows, p)], [D, f, z], [E, h, eye]], 1, 2)
    rhs = left @ qdet([[A, B, C], [D, f, g], [E, h, i]])
    return lhs, rhs


def check_nc_jacobi(trials: int = 100, p: int = 1, seed: int = 0) -> IdentityReport:
    return _run("ncj", p, trials, seed, _draw_3x3(p), _eval_ncj)


def check_homological(trials: int = 100, p: int = 1, seed: int = 0) -> list:
    """Both relations: boxed ``h`` (right factor) and boxed ``g`` (left factor)."""
    return [
        _run("homo_h", p, trials, seed, _draw_3x3(p), _eval_homo_h),
        _run("homo_g", p, trials, seed, _draw_3x3(p), _eval_homo_g),
    ]


# -- derivative formulas --------------------------------------------------

def _draw_jet_2x2(p, grammian=False):
    """Jet blocks ``[[A, B], [C, d]]`` with ``A`` of 1..3 block rows.

    With ``grammian`` the first derivative of ``A`` is forced to a sum of
    ``k`` rank factors ``E_i F_i``.
    """

    def draw(rng):
        n = rng.randint(1, 3)
        N = n * p
        b = {"A": rand_mat(rng, N, N, JQQ), "B": rand_mat(rng, N, p, JQQ),
             "C": rand_mat(rng, p, N, JQQ), "d": rand_mat(rng, p, p, JQQ)}
        b["n"] = Mat.scalar(n)
        if grammian:
            k = rng.randint(1, 2)
            Es = [rand_mat(rng, N, p) for _ in range(k)]
            Fs = [rand_mat(rng, p, N) for _ in range(k)]
            dA = Es[0] @ Fs[0]
            for e, f in zip(Es[1:], Fs[1:]):
                dA = dA + e @ f
            A = b["A"]
            b["A"] = Mat.from_parts(A.part(0), dA, A.part(2))
            for j, (e, f) in enumerate(zip(Es, Fs)):
                b[f"E{j}"] = e
                b[f"F{j}"] = f
        return b, n + 1

    return draw


def _parts(b):
    A, B, C, d = b["A"], b["B"], b["C"], b["d"]
    return A.value, A.d, B.value, B.d, C.value, C.d, d.value, d.d


def _lhs_dqd(b):
    A, B, C, d = b["A"], b["B"], b["C"], b["d"]
    _require_invertible(A.value)
    return qdet([[A, B], [C, d]]).d


def rhs_general(b):
    A, dA, B, dB, C, dC, d, dd = _parts(b)
    Ai = invert(A)
    return dd - dC @ Ai @ B - C @ Ai @ dB + C @ Ai @ dA @ Ai @ B


def rhs_grammian(b, factors):
    A, dA, B, dB, C, dC, d, dd = _parts(b)
    p = d.rows
    z = Mat.zeros(p, p)
    out = dd + qdet([[A, B], [dC, z]]) + qdet([[A, dB], [C, z]])
    for e, f in factors:
        out = out + qdet([[A, e], [C, z]]) @ qdet([[A, B], [f, z]])
    return out


def _unit_row(j, n, p):
    eye, z = Mat.identity(p), Mat.zeros(p, p)
    return Mat.from_blocks([[eye if k == j else z for k in range(n)]])


def rhs_row(b):
    A, dA, B, dB, C, dC, d, dd = _parts(b)
    p = d.rows
    n = A.rows // p
    z = Mat.zeros(p, p)
    out = qdet([[A, B], [dC, dd]])
    for j in range(n):
        ej = _unit_row(j, n, p)
        rows = range(j * p, (j + 1) * p)
        dAj = dA.submatrix(rows, range(A.cols))
        dBj = dB.submatrix(rows, range(p))
        out = out + qdet([[A, ej.T], [C, z]]) @ qdet([[A, B], [dAj, dBj]])
    return out


def rhs_column(b):
    A, dA, B, dB, C, dC, d, dd = _parts(b)
    p = d.rows
    n = A.rows // p
    z = Mat.zeros(p, p)
    out = qdet([[A, dB], [C, dd]])
    for j in range(n):
        ej = _unit_row(j, n, p)
        cols = range(j * p, (j + 1) * p)
        dAj = dA.submatrix(range(A.rows), cols)
        dCj = dC.submatrix(range(p), cols)
        out = out + qdet([[A, dAj], [C, dCj]]) @ qdet([[A, B], [ej, z]])
    return out


def _grammian_factors(b):
    out, j = [], 0
    while f"E{j}" in b:
        out.append((b[f"E{j}"], b[f"F{j}"]))
        j += 1
    return out


def _columns_as_factors(b):
    """Any ``A'`` is Grammian-like: ``A' = sum_j (A')_j e_j``."""
    dA = b["A"].d
    p = b["d"].rows
    n = dA.rows // p
    return [(dA.submatrix(range(dA.rows), range(j * p, (j + 1) * p)), _unit_row(j, n, p)) for j in range(n)]


def _eval_dqd(b):
    return _lhs_dqd(b), rhs_general(b)


def _eval_dqd1(b):
    return _lhs_dqd(b), rhs_grammian(b, _grammian_factors(b))


def _eval_dqd2(b):
    return _lhs_dqd(b), rhs_row(b)


def _eval_dqd3(b):
    return _lhs_dqd(b), rhs_column(b)


def _eval_agree(b):
    """All four right-hand sides coincide; mismatches show up as ``lhs != rhs``."""
    _require_invertible(b["A"].value)
    vals = [rhs_general(b), rhs_grammian(b, _columns_as_factors(b)), rhs_row(b), rhs_column(b)]
    first = vals[0]
    for v in vals[1:]:
        if v != first:
            return first, v
    return first, first


_DQD = {
    "dqd": (False, _eval_dqd),
    "dqd1": (True, _eval_dqd1),
    "dqd2": (False, _eval_dqd2),
    "dqd3": (False, _eval_dqd3),
    "dqd_agree": (False, _eval_agree),
}


def check_derivative_formulas(family: str = "general", trials: int = 100, p: int = 1, seed: int = 0) -> IdentityReport:
    """``family`` is one of ``general``, ``grammian``, ``row``, ``column`` or ``agree``."""
    names = {"general": "dqd", "grammian": "dqd1", "row": "dqd2", "column": "dqd3", "agree": "dqd_agree"}
    key = names.get(family, family)
    if key not in _DQD:
        raise ValueError(f"unknown derivative-formula family {family!r}")
    grammian, evaluate = _DQD[key]
    return _run(key, p, trials, seed, _draw_jet_2x2(p, grammian), evaluate)


def run_identities(which: str = "all", trials: int = 100, p: int = 1, seed: int = 0) -> list:
    if which == "all":
        names = IDENTITIES
    elif which in GROUPS:
        names = GROUPS[which]
    elif which in IDENTITIES:
        names = (which,)
    else:
        raise ValueError(f"unknown identity group {which!r}")
    out = []
    for name in names:
        if name == "ncj":
            out.append(check_nc_jacobi(trials, p, seed))
        elif name == "homo_h":
            out.append(_run("homo_h", p, trials, seed, _draw_3x3(p), _eval_homo_h))
        elif name == "homo_g":
            out.append(_run("homo_g", p, trials, seed, _draw_3x3(p), _eval_homo_g))
        else:
            out.append(check_derivative_formulas(name, trials, p, seed))
    return out
