"""Dense matrices over a :mod:`mcbop.ring` backend, with p x p block views.

All block-level algorithms (quasideterminants, the noncommutative solver)
reindex into scalar rows and columns and reuse the scalar kernels.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import kernels
from .errors import QuasideterminantUndefined, Singular
from .ring import QQ, Jet2, Ring, jet_ring


def join_rings(r1: Ring, r2: Ring) -> Ring:
    if r1 is r2:
        return r1
    if r1.is_jet and not r2.is_jet:
        return r1
    if r2.is_jet and not r1.is_jet:
        return r2
    if r1.exact and not r2.exact:
        return r2
    return r1


class Mat:
    """Immutable dense matrix, row-major."""

    __slots__ = ("rows", "cols", "ring", "_e")

    def __init__(self, rows: int, cols: int, entries, ring: Ring = QQ):
        entries = tuple(entries)
        if len(entries) != rows * cols:
            raise ValueError(f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}")
        self.rows = rows
        self.cols = cols
        self.ring = ring
        self._e = entries

    # -- construction -------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ring: Ring = QQ) -> "Mat":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, (ring(v) for r in rows for v in r), ring)

    @classmethod
    def identity(cls, n: int, ring: Ring = QQ) -> "Mat":
        z, o = ring.zero, ring.one
        return cls(n, n, (o if i == j else z for i in range(n) for j in range(n)), ring)

    @classmethod
    def zeros(cls, rows: int, cols: int, ring: Ring = QQ) -> "Mat":
        return cls(rows, cols, (ring.zero,) * (rows * cols), ring)

    @classmethod
    def scalar(cls, value, ring: Ring = QQ) -> "Mat":
        return cls(1, 1, (ring(value),), ring)

    @classmethod
    def from_blocks(cls, grid: Sequence[Sequence["Mat"]], ring: Optional[Ring] = None) -> "Mat":
        """Assemble a matrix from a rectangular grid of blocks."""
        if ring is None:
            ring = grid[0][0].ring
            for row in grid:
                for b in row:
                    ring = join_rings(ring, b.ring)
        heights = [row[0].rows for row in grid]
        widths = [b.cols for b in grid[0]]
        for bi, row in enumerate(grid):
            for bj, b in enumerate(row):
                if b.rows != heights[bi] or b.cols != widths[bj]:
                    raise ValueError("inconsistent block sizes")
        out = []
        for bi, row in enumerate(grid):
            for r in range(heights[bi]):
                for b in row:
                    out.extend(b._e[r * b.cols:(r + 1) * b.cols])
        return cls(sum(heights), sum(widths), out, ring)

    @classmethod
    def from_parts(cls, c0: "Mat", c1: "Mat", c2: Optional["Mat"] = None) -> "Mat":
        """Jet matrix ``c0 + c1*eps + c2*eps**2`` from base-ring matrices."""
        if c2 is None:
            c2 = cls.zeros(c0.rows, c0.cols, c0.ring)
        ring = jet_ring(c0.ring)
        return cls(c0.rows, c0.cols, (Jet2(a, b, c) for a, b, c in zip(c0._e, c1._e, c2._e)), ring)

    # -- access --------------------------------------------------------
    @property
    def entries(self) -> tuple:
        return self._e

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self._e[i * self.cols + j]

    def row_lists(self):
        c = self.cols
        return [list(self._e[i * c:(i + 1) * c]) for i in range(self.rows)]

    def submatrix(self, rsel: Sequence[int], csel: Sequence[int]) -> "Mat":
        e, c = self._e, self.cols
        return Mat(len(rsel), len(csel), (e[i * c + j] for i in rsel for j in csel), self.ring)

    def block(self, i: int, j: int, p: int) -> "Mat":
        return self.submatrix(range(i * p, (i + 1) * p), range(j * p, (j + 1) * p))

    def block_rows(self, p: int) -> int:
        if self.rows % p or self.cols % p:
            raise ValueError(f"{self.rows}x{self.cols} is not divisible into {p}x{p} blocks")
        return self.rows // p

    def column_blocks(self, p: int) -> list:
        """Split an (n p) x p column into its n blocks."""
        return [self.submatrix(range(k * p, (k + 1) * p), range(self.cols)) for k in range(self.rows // p)]

    # -- ring changes --------------------------------------------------
    def map(self, f, ring: Ring) -> "Mat":
        return Mat(self.rows, self.cols, (f(v) for v in self._e), ring)

    def to_ring(self, ring: Ring) -> "Mat":
        if ring is self.ring:
            return self
        return self.map(ring, ring)

    def part(self, k: int) -> "Mat":
        """Coefficient ``k`` of a jet matrix (value, derivative, half second derivative)."""
        if not self.ring.is_jet:
            return self if k == 0 else Mat.zeros(self.rows, self.cols, self.ring)
        attr = ("c0", "c1", "c2")[k]
        return Mat(self.rows, self.cols, (getattr(v, attr) for v in self._e), self.ring.base)

    @property
    def value(self) -> "Mat":
        return self.part(0)

    @property
    def d(self) -> "Mat":
        """First t-derivative (jet coefficient 1)."""
        return self.part(1)

    # -- arithmetic ----------------------------------------------------
    def _check_same(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Mat") -> "Mat":
        self._check_same(other)
        return Mat(self.rows, self.cols, (a + b for a, b in zip(self._e, other._e)), join_rings(self.ring, other.ring))

    def __sub__(self, other: "Mat") -> "Mat":
        self._check_same(other)
        return Mat(self.rows, self.cols, (a - b for a, b in zip(self._e, other._e)), join_rings(self.ring, other.ring))

    def __neg__(self) -> "Mat":
        return Mat(self.rows, self.cols, (-a for a in self._e), self.ring)

    def scale(self, s) -> "Mat":
        ring = self.ring
        if isinstance(s, Jet2) and not ring.is_jet:
            ring = jet_ring(ring)
        return Mat(self.rows, self.cols, (s * a for a in self._e), ring)

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ring = join_rings(self.ring, other.ring)
        out = kernels.matmul(list(self._e), list(other._e), self.rows, self.cols, other.cols, ring.zero)
        return Mat(self.rows, other.cols, out, ring)

    @property
    def T(self) -> "Mat":
        r, c, e = self.rows, self.cols, self._e
        return Mat(c, r, (e[i * c + j] for j in range(c) for i in range(r)), self.ring)

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and all(a == b for a, b in zip(self._e, other._e))

    def __hash__(self):
        return hash((self.rows, self.cols, self._e))

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(v) for v in self._e)

    def max_abs(self):
        return max((abs(v) for v in self._e), default=0)

    def inv(self) -> "Mat":
        return invert(self)

    def solve(self, rhs: "Mat") -> "Mat":
        return solve(self, rhs)

    def to_json(self):
        ring = self.ring
        return [[ring.to_json(v) for v in row] for row in self.row_lists()]

    def __repr__(self):
        return f"Mat({self.rows}x{self.cols}, {self.ring.name}, {self.row_lists()!r})"


def _solve_base(a: Mat, b: Mat) -> Mat:
    ring = join_rings(a.ring, b.ring)
    out = kernels.gauss_jordan(list(a._e), list(b._e), a.rows, b.cols, ring.is_unit, ring.inv, not ring.exact)
    if out is None:
        raise Singular(f"{a.rows}x{a.cols} matrix over {ring.name} is singular")
    return Mat(a.rows, b.cols, out, ring)


def solve(a: Mat, b: Mat) -> Mat:
    """Return ``X`` with ``A X = B``.

    Over jets the value part is factored once and the derivative parts are
    recovered order by order: ``A0 X1 = B1 - A1 X0`` and
    ``A0 X2 = B2 - A1 X1 - A2 X0``.
    """
    if a.rows != a.cols:
        raise ValueError("solve needs a square matrix")
    if a.rows != b.rows:
        raise ValueError("right-hand side has wrong height")
    if a.rows == 0:
        return Mat(0, b.cols, (), join_rings(a.ring, b.ring))
    ring = join_rings(a.ring, b.ring)
    if not ring.is_jet:
        return _solve_base(a, b)
    a = a.to_ring(ring)
    b = b.to_ring(ring)
    a0, a1, a2 = a.part(0), a.part(1), a.part(2)
    inv0 = _solve_base(a0, Mat.identity(a.rows, ring.base))
    x0 = inv0 @ b.part(0)
    x1 = inv0 @ (b.part(1) - a1 @ x0)
    x2 = inv0 @ (b.part(2) - a1 @ x1 - a2 @ x0)
    return Mat.from_parts(x0, x1, x2)


def invert(a: Mat) -> Mat:
    """Inverse of a square matrix; raises :class:`Singular`."""
    if a.rows != a.cols:
        raise ValueError("invert needs a square matrix")
    if not a.ring.is_jet:
        return _solve_base(a, Mat.identity(a.rows, a.ring))
    a0, a1, a2 = a.part(0), a.part(1), a.part(2)
    x0 = _solve_base(a0, Mat.identity(a.rows, a0.ring))
    x1 = -(x0 @ a1 @ x0)
    x2 = -(x0 @ (a1 @ x1 + a2 @ x0))
    return Mat.from_parts(x0, x1, x2)


def is_invertible(a: Mat) -> bool:
    try:
        invert(a)
    except Singular:
        return False
    return True


@dataclass(frozen=True)
class QDResult:
    value: Optional[Mat]
    defined: bool

    def unwrap(self) -> Mat:
        if not self.defined:
            raise QuasideterminantUndefined("?", "?")
        return self.value


def _quasidet(a: Mat, rsel: Sequence[int], csel: Sequence[int]) -> QDResult:
    rset, cset = set(rsel), set(csel)
    rest_r = [i for i in range(a.rows) if i not in rset]
    rest_c = [j for j in range(a.cols) if j not in cset]
    if len(rest_r) != len(rest_c):
        raise ValueError("deleted submatrix is not square")
    box = a.submatrix(rsel, csel)
    if not rest_r:
        return QDResult(box, True)
    sub = a.submatrix(rest_r, rest_c)
    r = a.submatrix(rsel, rest_c)
    c = a.submatrix(rest_r, csel)
    try:
        y = solve(sub, c)
    except Singular:
        return QDResult(None, False)
    return QDResult(box - r @ y, True)


def quasidet(a: Mat, i: int, j: int, p: int = 1) -> QDResult:
    """``|A|_{i,j} = a_ij - r_i^j (A^{i,j})^{-1} c_j^i`` (0-based, blockwise when ``p > 1``)."""
    a.block_rows(p)
    return _quasidet(a, range(i * p, (i + 1) * p), range(j * p, (j + 1) * p))


def qdet(grid: Sequence[Sequence[Mat]], bi: int = -1, bj: int = -1) -> Mat:
    """Quasideterminant of a block grid with the box at grid cell ``(bi, bj)``.

    Grid blocks may have different sizes; the boxed cell is the block
    addressed by grid row ``bi`` and grid column ``bj``.  Raises
    :class:`QuasideterminantUndefined` when the complement is singular.
    """
    nr, nc = len(grid), len(grid[0])
    bi %= nr
    bj %= nc
    full = Mat.from_blocks(grid)
    r0 = sum(grid[k][0].rows for k in range(bi))
    c0 = sum(grid[0][k].cols for k in range(bj))
    res = _quasidet(full, range(r0, r0 + grid[bi][0].rows), range(c0, c0 + grid[0][bj].cols))
    if not res.defined:
        raise QuasideterminantUndefined(bi, bj)
    return res.value


def solve_nc(a: Mat, xi: Sequence[Mat], p: int = 1, method: str = "auto") -> list:
    """Solve ``sum_j a_ij x_j = xi_i`` over p x p blocks.

    ``method="quasidet"`` uses ``x_i = sum_j |A|_{j,i}^{-1} xi_j``;
    ``"elimination"`` uses Gaussian elimination; ``"auto"`` tries the
    quasideterminant formula and falls back when some ``|A|_{j,i}`` is
    undefined or singular.
    """
    n = a.block_rows(p)
    if len(xi) != n:
        raise ValueError("right-hand side has wrong number of blocks")
    if method in ("auto", "quasidet"):
        try:
            out = []
            qinv = [[None] * n for _ in range(n)]
            for jj in range(n):
                for ii in range(n):
                    q = quasidet(a, jj, ii, p)
                    if not q.defined:
                        raise QuasideterminantUndefined(jj, ii)
                    qinv[jj][ii] = invert(q.value)
            for ii in range(n):
                acc = qinv[0][ii] @ xi[0]
                for jj in range(1, n):
                    acc = acc + qinv[jj][ii] @ xi[jj]
                out.append(acc)
            return out
        except Singular:
            if method == "quasidet":
                raise
    rhs = Mat.from_blocks([[x] for x in xi])
    return solve(a, rhs).column_blocks(p)
