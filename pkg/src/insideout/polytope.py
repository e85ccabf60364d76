"""Rational polytopes ``s ∩ [0,1]^d`` (cubical) and ``s ∩ R^d_{>=0}`` (orthant)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial, lcm
from typing import Optional

from .errors import DegeneratePolytope, InfeasibleSystem, TooLarge, UnboundedPolytope
from .exact import AffineSubspace, det, lattice_coordinates, rank, solve_square
from .simplex import maximize

CUBICAL = "cubical"
ORTHANT = "orthant"

DEFAULT_SUBSET_BUDGET = 2_000_000


@dataclass(frozen=True)
class HPolytope:
    """``P = s ∩ {0 <= x_i (<= 1)}``; ``upper`` is 1 for cubes, None for the orthant."""

    subspace: AffineSubspace
    mode: str
    degenerate: bool = False

    @property
    def d(self) -> int:
        return self.subspace.ambient_dim

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @property
    def upper(self) -> Optional[int]:
        return 1 if self.mode == CUBICAL else None

    def inequalities(self):
        """Rows ``(a, b)`` meaning ``a . x >= b``."""
        d = self.d
        rows = []
        for i in range(d):
            e = [0] * d
            e[i] = 1
            rows.append((tuple(e), 0))
        if self.mode == CUBICAL:
            for i in range(d):
                e = [0] * d
                e[i] = -1
                rows.append((tuple(e), -1))
        return rows


@dataclass(frozen=True)
class VertexSet:
    vertices: tuple
    denominator: int
    tight: tuple = field(default=(), compare=False)  # frozenset of tight inequality indices per vertex


def interior_slack(subspace: AffineSubspace, mode: str, extra_rows=(), extra_rhs=()):
    """Largest ``delta <= 1`` with a point of the subspace having every bound slack >= delta.

    Returns None when the closed polytope is empty.
    """
    d = subspace.ambient_dim
    # variables x_0..x_{d-1}, w;  delta = 1 - w
    A_ub, b_ub = [], []
    for i in range(d):
        row = [0] * (d + 1)
        row[i] = -1
        row[d] = -1
        A_ub.append(row)  # x_i >= 1 - w
        b_ub.append(-1)
        if mode == CUBICAL:
            row = [0] * (d + 1)
            row[i] = 1
            row[d] = -1
            A_ub.append(row)  # x_i <= w  i.e. 1 - x_i >= 1 - w
            b_ub.append(0)
    A_eq = [list(r) + [0] for r in subspace.equations] + [list(r) + [0] for r in extra_rows]
    b_eq = list(subspace.rhs) + list(extra_rhs)
    c = [0] * d + [-1]
    res = maximize(c, A_ub, b_ub, A_eq, b_eq, free=list(range(d)))
    if res.status != "optimal":
        return None
    w = -res.value
    return 1 - w


def build_polytope(subspace: AffineSubspace, mode: str) -> HPolytope:
    """Intersect ``subspace`` with the unit cube or the nonnegative orthant.

    Raises:
        InfeasibleSystem: the subspace is empty or misses the cube/orthant.
        UnboundedPolytope: orthant mode with a recession direction.
    """
    if mode not in (CUBICAL, ORTHANT):
        raise ValueError(f"unknown polytope mode {mode!r}")
    if not subspace.feasible:
        raise InfeasibleSystem("the defining linear system has no solution")
    d = subspace.ambient_dim
    if mode == ORTHANT:
        res = maximize([1] * d, [], [], subspace.equations, subspace.rhs)
        if res.status == "unbounded":
            raise UnboundedPolytope("s ∩ orthant is unbounded; some variable appears in no form")
    slack = interior_slack(subspace, mode)
    if slack is None or slack < 0:
        raise InfeasibleSystem("the subspace does not meet the bounding region")
    return HPolytope(subspace, mode, degenerate=(slack <= 0))


def require_nondegenerate(P: HPolytope) -> None:
    if P.degenerate:
        raise DegeneratePolytope("P lies in a coordinate hyperplane; remove the forced-zero variables")


def _param_rows(P: HPolytope):
    """Each inequality as (coefficients in free coordinates, constant) for ``a.x - b``."""
    s = P.subspace
    out = []
    for a, b in P.inequalities():
        coeff = [sum((ai * v[i] for i, ai in enumerate(a) if ai), Fraction(0)) for v in s.direction_basis]
        const = sum((ai * s.particular_point[i] for i, ai in enumerate(a) if ai), Fraction(0)) - b
        out.append((coeff, const))
    return out


def _check_budget(n, k, budget):
    from math import comb

    total = comb(n, k)
    if total > budget:
        raise TooLarge(f"{total} constraint subsets exceed the budget of {budget}")


def vertices(P: HPolytope, budget: int = DEFAULT_SUBSET_BUDGET) -> VertexSet:
    """All vertices, by solving every ``dim``-subset of tight constraints."""
    s = P.subspace
    k = s.dim
    rows = _param_rows(P)
    if k == 0:
        return VertexSet((tuple(s.particular_point),), lcm(1, *(v.denominator for v in s.particular_point)),
                         (frozenset(i for i, (_, c) in enumerate(rows) if c == 0),))
    active = [i for i, (a, _) in enumerate(rows) if any(a)]
    _check_budget(len(active), k, budget)
    found: dict = {}
    for sub in combinations(active, k):
        y = solve_square([rows[i][0] for i in sub], [-rows[i][1] for i in sub])
        if y is None:
            continue
        key = tuple(y)
        if key in found:
            continue
        vals = [sum((a * v for a, v in zip(coeff, y)), c) for coeff, c in rows]
        if all(v >= 0 for v in vals):
            found[key] = frozenset(i for i, v in enumerate(vals) if v == 0)
    pts = []
    tight = []
    for y in sorted(found):
        x = _lift(s, y)
        pts.append(tuple(x))
        tight.append(found[y])
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    pts = [pts[i] for i in order]
    tight = [tight[i] for i in order]
    den = lcm(1, *(v.denominator for p in pts for v in p))
    return VertexSet(tuple(pts), den, tuple(tight))


def _lift(s: AffineSubspace, y):
    x = list(s.particular_point)
    for val, vec in zip(y, s.direction_basis):
        if val:
            for i in range(len(x)):
                x[i] += val * vec[i]
    return x


def _affine_dim(points) -> int:
    if len(points) <= 1:
        return 0
    p0 = points[0]
    return rank([[a - b for a, b in zip(p, p0)] for p in points[1:]])


def pulling_triangulation(points, tight, dim: int):
    """Triangulate a polytope from its vertices and their tight-constraint sets.

    Cones from the lexicographically smallest vertex over the recursively
    triangulated facets not containing it.  Returns index tuples.
    """

    def rec(idx: tuple, fdim: int):
        if fdim == 0:
            return [(idx[0],)]
        apex = min(idx, key=lambda i: points[i])
        common = frozenset.intersection(*(tight[i] for i in idx))
        seen = set()
        out = []
        for c in sorted(frozenset.union(*(tight[i] for i in idx)) - common):
            if c in tight[apex]:
                continue
            sub = tuple(i for i in idx if c in tight[i])
            if sub in seen or len(sub) < fdim:
                continue
            if _affine_dim([points[i] for i in sub]) != fdim - 1:
                continue
            seen.add(sub)
            out.extend((apex,) + simplex for simplex in rec(sub, fdim - 1))
        return out

    return rec(tuple(range(len(points))), dim)


def normalized_volume(P: HPolytope, lattice_scale: int = 1, vs: Optional[VertexSet] = None) -> Fraction:
    """Relative volume of ``P`` with the lattice ``Z^d ∩ lin(s)`` as unit.

    ``lattice_scale`` must be a multiple of the period ``p(s)``: it names the
    dilation ``lattice_scale * P`` whose affine hull carries integer points,
    and the value returned is that dilate's lattice volume divided by
    ``lattice_scale ** dim``; it is the leading coefficient of the Ehrhart
    quasipolynomial on dilations divisible by ``p(s)``.
    """
    s = P.subspace
    if lattice_scale < 1 or lattice_scale % s.period:
        raise ValueError(f"lattice_scale must be a positive multiple of p(s) = {s.period}")
    vs = vs or vertices(P)
    k = s.dim
    if k == 0:
        return Fraction(1)
    basis = s.lattice_basis
    piv = s.lattice_pivots
    origin = vs.vertices[0]
    coords = [lattice_coordinates(basis, piv, [a - b for a, b in zip(v, origin)]) for v in vs.vertices]
    total = Fraction(0)
    for simplex in pulling_triangulation(vs.vertices, vs.tight, k):
        y0 = coords[simplex[0]]
        M = [[a - b for a, b in zip(coords[i], y0)] for i in simplex[1:]]
        total += abs(det(M))
    return total / factorial(k)


def contains(P: HPolytope, x, open: bool = False) -> bool:
    """Membership in the closed polytope, or (``open=True``) its relative interior."""
    if len(x) != P.d:
        raise ValueError("point has wrong dimension")
    x = [Fraction(v) for v in x]
    if not P.subspace.contains(x):
        return False
    up = P.upper
    if open:
        return all(v > 0 and (up is None or v < up) for v in x)
    return all(v >= 0 and (up is None or v <= up) for v in x)
