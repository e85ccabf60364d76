"""Exact lattice-point counts of dilates ``tP`` with distinctness and multiplicity.

Integer points of ``t s`` are ``(t/p) z + K y`` with ``K`` the HNF lattice
basis and ``y`` integral.  The leading coordinates of ``y`` range over a box
taken from the dilated vertices; the last one gets its exact range from the
coordinate bounds, so the whole sweep is a handful of vectorised numpy passes.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor, prod
from typing import Iterable, Optional

import numpy as np

from .arrangement import ForbiddenGraph
from .clutters import InsideOutProblem
from .errors import NotConstantWeight, NotTransverse, TooLarge
from .exact import AffineSubspace, lattice_coordinates
from .polytope import CUBICAL, HPolytope, build_polytope, vertices

OPEN_STRONG = "open-strong"
CLOSED_MULT = "closed-with-multiplicity"
WEAK_OPEN = "weak-open"
WEAK_CLOSED = "weak-closed"
MOEBIUS_OPEN = "moebius-open"
MOEBIUS_CLOSED = "moebius-closed"
REGIMES = (OPEN_STRONG, CLOSED_MULT, WEAK_OPEN, WEAK_CLOSED, MOEBIUS_OPEN, MOEBIUS_CLOSED)

_CHUNK = 1 << 18


class LatticeEnumerator:
    """Integer points of ``tP`` (closed or open) for one polytope, any ``t``."""

    def __init__(self, P: HPolytope, max_points: int = 10**8):
        self.P = P
        self.max_points = max_points
        s = P.subspace
        self.s = s
        self.p = s.period
        self.d = s.ambient_dim
        self.k = s.dim
        self.K = np.array(s.lattice_basis, dtype=np.int64).reshape(self.k, self.d)
        self.z = np.array(s.integer_point, dtype=np.int64)
        piv = s.lattice_pivots
        z_unit = [Fraction(v, self.p) for v in s.integer_point]
        vs = vertices(P)
        # vertex coordinates relative to z/p, in lattice coordinates, per unit dilation
        self.vcoords = [
            lattice_coordinates(s.lattice_basis, piv, [a - b for a, b in zip(v, z_unit)]) for v in vs.vertices
        ]

    def _box(self, t: int):
        lo, hi = [], []
        for j in range(self.k):
            vals = [t * c[j] for c in self.vcoords]
            lo.append(ceil(min(vals)))
            hi.append(floor(max(vals)))
        return lo, hi

    def chunks(self, t: int, open: bool) -> Iterable[np.ndarray]:
        """Yield arrays of integer points (rows) of ``tP°`` or ``tP``."""
        if t < 0:
            raise ValueError("dilation must be nonnegative")
        if t % self.p:
            return
        base0 = (t // self.p) * self.z
        lower = 1 if open else 0
        upper = None
        if self.P.mode == CUBICAL:
            upper = t - 1 if open else t
        if self.k == 0:
            x = base0[None, :]
            if _in_bounds(x, lower, upper).all():
                yield x
            return
        lo, hi = self._box(t)
        sizes = [max(0, h - l + 1) for l, h in zip(lo, hi)]
        if prod(sizes) > self.max_points:
            raise TooLarge(f"bounding box of {prod(sizes)} candidates exceeds max_points={self.max_points}")
        if 0 in sizes:
            return
        last = self.K[-1]
        prefix_sizes = sizes[:-1]
        n_prefix = prod(prefix_sizes)
        for start in range(0, n_prefix, _CHUNK):
            idx = np.arange(start, min(n_prefix, start + _CHUNK), dtype=np.int64)
            base = np.broadcast_to(base0, (len(idx), self.d)).copy()
            rem = idx
            for j in range(self.k - 2, -1, -1):
                yj = rem % prefix_sizes[j] + lo[j]
                rem = rem // prefix_sizes[j]
                base += yj[:, None] * self.K[j][None, :]
            ylo = np.full(len(idx), lo[-1], dtype=np.int64)
            yhi = np.full(len(idx), hi[-1], dtype=np.int64)
            ok = np.ones(len(idx), dtype=bool)
            for i in range(self.d):
                a = int(last[i])
                b = base[:, i]
                if a == 0:
                    ok &= b >= lower
                    if upper is not None:
                        ok &= b <= upper
                    continue
                if a > 0:
                    ylo = np.maximum(ylo, -((b - lower) // a))  # ceil((lower - b) / a)
                    if upper is not None:
                        yhi = np.minimum(yhi, (upper - b) // a)
                else:
                    yhi = np.minimum(yhi, (lower - b) // a)
                    if upper is not None:
                        ylo = np.maximum(ylo, -((b - upper) // a))  # ceil((upper - b) / a)
            counts = np.where(ok, np.maximum(yhi - ylo + 1, 0), 0)
            total = int(counts.sum())
            if total == 0:
                continue
            rows = np.repeat(np.arange(len(idx)), counts)
            offsets = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
            y = ylo[rows] + offsets
            yield base[rows] + y[:, None] * last[None, :]


def _in_bounds(x, lower, upper):
    ok = (x >= lower).all(axis=1)
    if upper is not None:
        ok &= (x <= upper).all(axis=1)
    return ok


def distinct_mask(X: np.ndarray, graph: ForbiddenGraph) -> np.ndarray:
    """Rows whose entries differ across every edge of ``graph``."""
    if not graph.edges:
        return np.ones(len(X), dtype=bool)
    if graph.d > 1 and graph.is_complete:
        S = np.sort(X, axis=1)
        return (np.diff(S, axis=1) != 0).all(axis=1)
    ok = np.ones(len(X), dtype=bool)
    for i, j in graph.edges:
        ok &= X[:, i] != X[:, j]
    return ok


def multiplicity(X: np.ndarray, orientations) -> np.ndarray:
    """Number of orientations compatible with each row (weak inequality on every arc)."""
    m = np.zeros(len(X), dtype=np.int64)
    for o in orientations:
        if not o.arcs:
            m += 1
            continue
        I = np.fromiter((a for a, _ in o.arcs), dtype=np.intp)
        J = np.fromiter((b for _, b in o.arcs), dtype=np.intp)
        m += (X[:, J] >= X[:, I]).all(axis=1)
    return m


def _enumerator(problem: InsideOutProblem) -> LatticeEnumerator:
    cache = problem.__dict__.setdefault("_enumerator_cache", {})
    if "main" not in cache:
        cache["main"] = LatticeEnumerator(problem.polytope, problem.budgets.max_points)
    return cache["main"]


def count_open(problem: InsideOutProblem, t: int) -> int:
    """Integer points of ``tP°`` with distinct entries across every forbidden edge."""
    if t < 1:
        raise ValueError("open counts need t >= 1")
    en = _enumerator(problem)
    return sum(int(distinct_mask(X, problem.graph).sum()) for X in en.chunks(t, open=True))


def count_closed_multiplicity(problem: InsideOutProblem, t: int) -> int:
    """Pairs (integer point of ``tP``, compatible realisable orientation)."""
    if t < 0:
        raise ValueError("closed counts need t >= 0")
    en = _enumerator(problem)
    regs = problem.regions
    return sum(int(multiplicity(X, regs).sum()) for X in en.chunks(t, open=False))


def count_weak(problem: InsideOutProblem, t: int, open: bool = True) -> int:
    """Integer points of ``tP°`` (or ``tP``) with no distinctness requirement."""
    if t < (1 if open else 0):
        raise ValueError("weak open counts need t >= 1, closed t >= 0")
    en = _enumerator(problem)
    return sum(len(X) for X in en.chunks(t, open=open))


def _flat_enumerators(problem: InsideOutProblem):
    cache = problem.__dict__.setdefault("_enumerator_cache", {})
    if "flats" not in cache:
        ens = []
        for f in problem.poset.flats:
            Pu = build_polytope(f.subspace, problem.polytope_mode)
            ens.append(LatticeEnumerator(Pu, problem.budgets.max_points))
        cache["flats"] = ens
    return cache["flats"]


def moebius_count(problem: InsideOutProblem, t: int, open: bool = True, force: bool = False) -> int:
    """Möbius-sum evaluation over the intersection poset of ``P°``.

    Each flat's term is a weak count on that flat.  The closed sum uses
    ``|mu|`` and needs transversality.

    Raises:
        NotConstantWeight: the forms do not have constant weight (unless ``force``).
        NotTransverse: closed sum requested for a non-transverse problem.
    """
    if not force and not problem.constant_weight:
        raise NotConstantWeight(f"{problem.name}: forms of unequal weight; Möbius formulas disabled")
    if not open and not problem.is_transversal:
        raise NotTransverse(f"{problem.name}: arrangement is not transverse to P")
    if t < (1 if open else 0):
        raise ValueError("t out of range")
    poset = problem.poset
    total = 0
    for mu, en in zip(poset.moebius, _flat_enumerators(problem)):
        c = sum(len(X) for X in en.chunks(t, open=open))
        total += (mu if open else abs(mu)) * c
    return total


def count(problem: InsideOutProblem, regime: str, t: int) -> int:
    if regime == OPEN_STRONG:
        return count_open(problem, t)
    if regime == CLOSED_MULT:
        return count_closed_multiplicity(problem, t)
    if regime == WEAK_OPEN:
        return count_weak(problem, t, open=True)
    if regime == WEAK_CLOSED:
        return count_weak(problem, t, open=False)
    if regime == MOEBIUS_OPEN:
        return moebius_count(problem, t, open=True)
    if regime == MOEBIUS_CLOSED:
        return moebius_count(problem, t, open=False)
    raise ValueError(f"unknown regime {regime!r}")


class CountSeries:
    """Exact counts ``t -> value`` for one problem and regime."""

    def __init__(self, problem: Optional[InsideOutProblem], regime: str, values: dict):
        self.problem = problem
        self.regime = regime
        self.values = dict(sorted(values.items()))

    def __getitem__(self, t):
        return self.values[t]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values.items())

    @classmethod
    def compute(cls, problem: InsideOutProblem, regime: str, ts: Iterable[int]) -> "CountSeries":
        return cls(problem, regime, {t: count(problem, regime, t) for t in ts})
