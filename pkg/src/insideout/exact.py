"""Exact rational linear algebra and integer lattices.

Everything here works on plain Python ints and :class:`fractions.Fraction`;
matrices are lists of rows.  Nothing in the counting path touches floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Sequence

Rational = Fraction
RatMatrix = list  # list[list[Fraction]], rectangular


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction("".join(value.split()))
        except ZeroDivisionError as exc:
            raise ValueError(f"zero denominator in {value!r}") from exc
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def fmt_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, p, q) with p*a + q*b == g == gcd(a, b) >= 0."""
    p0, q0, p1, q1 = 1, 0, 0, 1
    while b:
        k, r = divmod(a, b)
        a, b = b, r
        p0, p1 = p1, p0 - k * p1
        q0, q1 = q1, q0 - k * q1
    if a < 0:
        return -a, -p0, -q0
    return a, p0, q0


def integer_rows(A: Sequence[Sequence], b: Optional[Sequence] = None):
    """Scale each row (and its right-hand side) by the lcm of its denominators."""
    rows, rhs = [], []
    for i, row in enumerate(A):
        vals = [as_fraction(v) for v in row]
        if b is not None:
            vals.append(as_fraction(b[i]))
        m = lcm(*(v.denominator for v in vals)) if vals else 1
        ints = [int(v * m) for v in vals]
        if b is not None:
            rhs.append(ints.pop())
        rows.append(ints)
    return (rows, rhs) if b is not None else rows


def rref(A: Sequence[Sequence], b: Optional[Sequence] = None):
    """Reduced row echelon form of ``[A | b]``.

    Elimination runs fraction-free on integer rows (each row kept primitive
    by dividing out its content) and is normalised to Fractions at the end.

    Returns ``(rows, pivots)`` where rows are Fraction lists (including the
    right-hand side column when ``b`` is given) and ``pivots`` lists pivot
    columns among the first ``len(A[0])`` columns.
    """
    if b is None:
        M = integer_rows(A)
    else:
        M, rhs = integer_rows(A, b)
        M = [r + [c] for r, c in zip(M, rhs)]
    ncols = len(A[0]) if A else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        piv_row = M[r]
        p = piv_row[c]
        for i in range(len(M)):
            if i == r or M[i][c] == 0:
                continue
            f = M[i][c]
            new = [p * x - f * y for x, y in zip(M[i], piv_row)]
            g = 0
            for x in new:
                g = gcd(g, x)
            M[i] = [x // g for x in new] if g > 1 else new
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    out = []
    for i, row in enumerate(M):
        if i < len(pivots):
            p = row[pivots[i]]
            out.append([Fraction(x, p) for x in row])
        else:
            out.append([Fraction(x) for x in row])
    return out, pivots


def rank(A: Sequence[Sequence]) -> int:
    if not A:
        return 0
    return len(rref(A)[1])


def solve_square(A: Sequence[Sequence], b: Sequence) -> Optional[list[Fraction]]:
    """Unique solution of a square system, or None when singular."""
    n = len(A)
    rows, piv = rref(A, b)
    if len(piv) < n:
        return None
    return [rows[i][n] for i in range(n)]


def det(A: Sequence[Sequence]) -> Fraction:
    """Determinant by Bareiss elimination (exact)."""
    n = len(A)
    if n == 0:
        return Fraction(1)
    den = 1
    for row in A:
        for v in row:
            den = lcm(den, as_fraction(v).denominator)
    M = [[int(as_fraction(v) * den) for v in row] for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if sw is None:
                return Fraction(0)
            M[k], M[sw] = M[sw], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return Fraction(sign * M[n - 1][n - 1], den**n)


# ---------------------------------------------------------------- lattices


def column_hnf(A: Sequence[Sequence[int]], ncols: Optional[int] = None):
    """Column-style Hermite normal form of an integer matrix.

    Returns ``(H, U, r)`` with ``A @ U == H`` as column lists: ``H[j]`` and
    ``U[j]`` are column ``j``.  The first ``r`` columns of ``H`` are in
    echelon form with positive pivots, entries left of a pivot reduced into
    ``[0, pivot)``; the remaining columns are zero, so ``U[r:]`` is a
    Z-basis of the integer kernel of ``A``.
    """
    m = len(A)
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    H = [[A[i][j] for i in range(m)] for j in range(n)]
    U = [[1 if i == j else 0 for i in range(n)] for j in range(n)]

    def combine(j, k, p, q, u, v):
        # (col_j, col_k) <- (p*col_j + q*col_k, u*col_j + v*col_k), det == 1
        for M in (H, U):
            cj, ck = M[j], M[k]
            M[j] = [p * x + q * y for x, y in zip(cj, ck)]
            M[k] = [u * x + v * y for x, y in zip(cj, ck)]

    col = 0
    for i in range(m):
        if col >= n:
            break
        for k in range(col + 1, n):
            if H[k][i] == 0:
                continue
            a, b = H[col][i], H[k][i]
            g, p, q = xgcd(a, b)
            combine(col, k, p, q, -b // g, a // g)
        piv = H[col][i]
        if piv == 0:
            continue
        if piv < 0:
            H[col] = [-x for x in H[col]]
            U[col] = [-x for x in U[col]]
            piv = -piv
        for k in range(col):
            f = H[k][i] // piv
            if f:
                H[k] = [x - f * y for x, y in zip(H[k], H[col])]
                U[k] = [x - f * y for x, y in zip(U[k], U[col])]
        col += 1
    return H, U, col


def lattice_hnf(vectors: Sequence[Sequence[int]]) -> list[list[int]]:
    """Canonical echelon basis of the lattice spanned by ``vectors``."""
    if not vectors:
        return []
    d = len(vectors[0])
    cols = [list(v) for v in vectors]
    rows = [[cols[j][i] for j in range(len(cols))] for i in range(d)]
    H, _, r = column_hnf(rows, ncols=len(cols))
    return [H[j] for j in range(r)]


def integer_kernel(A: Sequence[Sequence]) -> list[list[int]]:
    """Z-basis of ``Z^d ∩ ker A`` in canonical echelon (HNF) form.

    ``A`` may have rational entries; rows are rescaled to integers first.
    """
    if not A:
        raise ValueError("empty coefficient matrix")
    d = len(A[0])
    M = integer_rows(A)
    _, U, r = column_hnf(M, ncols=d)
    return lattice_hnf(U[r:])


def pivot_positions(basis: Sequence[Sequence[int]]) -> list[int]:
    return [next(i for i, x in enumerate(v) if x != 0) for v in basis]


def lattice_coordinates(basis, pivots, v) -> list[Fraction]:
    """Coordinates of ``v`` (assumed in the rational span) w.r.t. an echelon basis."""
    y: list[Fraction] = []
    for j, pj in enumerate(pivots):
        acc = Fraction(v[pj]) - sum((y[i] * basis[i][pj] for i in range(j)), Fraction(0))
        y.append(acc / basis[j][pj])
    return y


@dataclass(frozen=True)
class AffineSubspace:
    """Exact solution set of ``A x = b`` in ``R^d``.

    ``integer_point`` is an integer solution of ``A x = period * b``; every
    integer point of ``t * s`` is ``(t / period) * integer_point`` plus an
    integer combination of ``lattice_basis`` (and there are none unless
    ``period`` divides ``t``).  The lattice data is computed on first use.
    """

    ambient_dim: int
    equations: tuple
    rhs: tuple
    particular_point: Optional[tuple]
    direction_basis: tuple
    pivots: tuple = ()
    free: tuple = ()

    @property
    def feasible(self) -> bool:
        return self.particular_point is not None

    @property
    def dim(self) -> int:
        return len(self.direction_basis)

    @property
    def is_linear(self) -> bool:
        return all(c == 0 for c in self.rhs)

    @cached_property
    def lattice_basis(self) -> tuple:
        if not self.direction_basis:
            return ()
        if not self.equations:
            d = self.ambient_dim
            return tuple(tuple(int(i == j) for i in range(d)) for j in range(d))
        return tuple(tuple(v) for v in integer_kernel(self.equations))

    @cached_property
    def _lattice_offset(self):
        if not self.feasible:
            return None, None
        if not self.equations:
            return 1, tuple([0] * self.ambient_dim)
        p, pt = _period_and_point(self.equations, self.rhs, self.ambient_dim)
        return p, tuple(pt)

    @property
    def period(self) -> Optional[int]:
        return self._lattice_offset[0]

    @property
    def integer_point(self) -> Optional[tuple]:
        return self._lattice_offset[1]

    @property
    def lattice_pivots(self) -> list[int]:
        return pivot_positions(self.lattice_basis)

    def contains(self, x) -> bool:
        return all(
            sum((a * v for a, v in zip(row, x)), Fraction(0)) == c
            for row, c in zip(self.equations, self.rhs)
        )

    def restrict(self, extra_rows, extra_rhs=None) -> "AffineSubspace":
        """Intersect with further equations."""
        extra_rhs = extra_rhs if extra_rhs is not None else [0] * len(extra_rows)
        return solve_affine(
            list(self.equations) + [list(r) for r in extra_rows],
            list(self.rhs) + list(extra_rhs),
            self.ambient_dim,
        )


def solve_affine(A: Sequence[Sequence], b: Optional[Sequence] = None, d: Optional[int] = None) -> AffineSubspace:
    """Solve ``A x = b`` exactly; infeasibility is reported, not raised."""
    if d is None:
        if not A:
            raise ValueError("coefficient matrix is empty and no dimension given")
        d = len(A[0])
    A = [[as_fraction(v) for v in row] for row in A]
    b = [as_fraction(v) for v in (b if b is not None else [0] * len(A))]
    if len(b) != len(A) or any(len(row) != d for row in A):
        raise ValueError("equation matrix is not rectangular")
    eq, rhs = tuple(tuple(r) for r in A), tuple(b)
    if not A:
        ident = tuple(tuple(Fraction(int(i == j)) for i in range(d)) for j in range(d))
        return AffineSubspace(d, eq, rhs, tuple([Fraction(0)] * d), ident, (), tuple(range(d)))
    R, piv = rref(A, b)
    free = [c for c in range(d) if c not in piv]
    directions = []
    for f in free:
        v = [Fraction(0)] * d
        v[f] = Fraction(1)
        for i, pc in enumerate(piv):
            v[pc] = -R[i][f]
        directions.append(tuple(v))
    if any(R[i][d] != 0 for i in range(len(piv), len(R))):
        return AffineSubspace(d, eq, rhs, None, tuple(directions), tuple(piv), tuple(free))
    x0 = [Fraction(0)] * d
    for i, pc in enumerate(piv):
        x0[pc] = R[i][d]
    return AffineSubspace(d, eq, rhs, tuple(x0), tuple(directions), tuple(piv), tuple(free))


def _period_and_point(A, b, d):
    M, rhs = integer_rows(A, b)
    H, U, r = column_hnf(M, ncols=d)
    # forward-solve H[:, :r] z = rhs along the pivot rows
    z: list[Fraction] = []
    row = 0
    for j in range(r):
        while H[j][row] == 0:
            row += 1
        acc = Fraction(rhs[row]) - sum((z[i] * H[i][row] for i in range(j)), Fraction(0))
        z.append(acc / H[j][row])
        row += 1
    p = lcm(1, *(v.denominator for v in z))
    point = [0] * d
    for j in range(r):
        c = int(z[j] * p)
        if c:
            for i in range(d):
                point[i] += c * U[j][i]
    return p, point


def period_of(s: AffineSubspace) -> int:
    """Least ``p >= 1`` such that ``p^-1 Z^d`` meets ``s``."""
    if not s.feasible:
        raise ValueError("empty subspace has no period")
    return s.period


def has_integer_point(A, b) -> bool:
    """Whether ``A x = b`` has an integer solution (HNF test)."""
    s = solve_affine(A, b)
    return s.feasible and s.period == 1
