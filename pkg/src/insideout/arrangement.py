"""Graphic hyperplane arrangements ``x_i = x_j`` induced on a subspace.

Flats are stored as partitions of the coordinates into blocks that are
connected in the forbidden graph; a flat is identified by the set of graph
edges whose hyperplane contains it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Iterable, Optional

from .errors import TooLarge
from .exact import AffineSubspace, rref, solve_square
from .polytope import CUBICAL, HPolytope, _check_budget, _param_rows, interior_slack
from .simplex import maximize

OPEN = "open"
CLOSED = "closed"
SUBSPACE = "subspace"

DEFAULT_MAX_ORIENTATIONS = 1_000_000
DEFAULT_MAX_FLATS = 200_000


@dataclass(frozen=True)
class ForbiddenGraph:
    d: int
    edges: tuple  # sorted pairs (i, j), i < j

    @classmethod
    def from_edges(cls, d: int, edges: Iterable) -> "ForbiddenGraph":
        es = set()
        for i, j in edges:
            if i == j:
                raise ValueError("loops are not allowed")
            es.add((min(i, j), max(i, j)))
        return cls(d, tuple(sorted(es)))

    @classmethod
    def complete(cls, d: int) -> "ForbiddenGraph":
        return cls(d, tuple(combinations(range(d), 2)))

    @classmethod
    def empty(cls, d: int) -> "ForbiddenGraph":
        return cls(d, ())

    @property
    def is_complete(self) -> bool:
        return len(self.edges) == self.d * (self.d - 1) // 2

    def adjacency(self) -> list[set]:
        adj = [set() for _ in range(self.d)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj


def _vanishes(s: AffineSubspace, i: int, j: int) -> bool:
    """Whether ``x_i == x_j`` holds identically on ``s``."""
    if s.particular_point[i] != s.particular_point[j]:
        return False
    return all(v[i] == v[j] for v in s.direction_basis)


@dataclass(frozen=True)
class InducedArrangement:
    subspace: AffineSubspace
    graph: ForbiddenGraph
    hyperplanes: tuple  # one representative edge per distinct hyperplane of s
    classes: tuple  # all edges sharing each representative's hyperplane
    dropped: tuple  # edges whose hyperplane contains s


def induce(graph: ForbiddenGraph, s: AffineSubspace) -> InducedArrangement:
    """Restrict the graphic arrangement to ``s``, merging equal traces."""
    if not s.feasible:
        raise ValueError("cannot induce on an empty subspace")
    dropped = []
    groups: dict = {}
    for i, j in graph.edges:
        if _vanishes(s, i, j):
            dropped.append((i, j))
            continue
        # trace of x_i - x_j on s, normalised
        coeff = [v[i] - v[j] for v in s.direction_basis]
        const = s.particular_point[i] - s.particular_point[j]
        lead = next(c for c in coeff + [const] if c != 0)
        key = (tuple(c / lead for c in coeff), const / lead)
        groups.setdefault(key, []).append((i, j))
    classes = tuple(tuple(g) for g in groups.values())
    return InducedArrangement(s, graph, tuple(g[0] for g in classes), classes, tuple(dropped))


# ------------------------------------------------------------- feasibility


@dataclass(frozen=True)
class Orientation:
    """Strict arcs ``x_i < x_j``.  ``order`` is set for permutations (increasing)."""

    arcs: tuple
    order: Optional[tuple] = None

    @classmethod
    def from_permutation(cls, order) -> "Orientation":
        order = tuple(order)
        return cls(tuple(zip(order, order[1:])), order)

    def positions(self) -> tuple:
        """1-based rank of each point (only for permutations)."""
        pos = [0] * len(self.order)
        for r, i in enumerate(self.order):
            pos[i] = r + 1
        return tuple(pos)

    def is_acyclic(self, d: int) -> bool:
        return _acyclic(d, self.arcs)


def _acyclic(d, arcs) -> bool:
    out = [[] for _ in range(d)]
    indeg = [0] * d
    for i, j in arcs:
        out[i].append(j)
        indeg[j] += 1
    stack = [v for v in range(d) if indeg[v] == 0]
    seen = 0
    while stack:
        v = stack.pop()
        seen += 1
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(w)
    return seen == d


def independent_equations(s: AffineSubspace):
    rows, piv = rref(s.equations, s.rhs) if s.equations else ([], [])
    d = s.ambient_dim
    return [r[:d] for r in rows[: len(piv)]], [r[d] for r in rows[: len(piv)]]


def max_slack(s: AffineSubspace, arcs, target: str = OPEN, mode: str = CUBICAL, extra_eq=()):
    """Maximise ``delta <= 1`` with ``x_j - x_i >= delta`` on every arc.

    ``target`` chooses the region: the open polytope (bounds also need slack
    ``delta``), the closed polytope (bounds weak), or the whole subspace.
    Returns ``(delta, point)``; ``(None, None)`` when the subspace is empty.
    """
    d = s.ambient_dim
    A_eq, b_eq = independent_equations(s)
    A_eq = [list(r) + [0] for r in A_eq]
    for i, j in extra_eq:
        row = [0] * (d + 1)
        row[i], row[j] = 1, -1
        A_eq.append(row)
        b_eq = list(b_eq) + [0]
    A_ub, b_ub = [], []
    for i, j in arcs:
        row = [0] * (d + 1)
        row[i], row[j], row[d] = 1, -1, -1
        A_ub.append(row)
        b_ub.append(-1)
    if target == OPEN:
        for i in range(d):
            row = [0] * (d + 1)
            row[i], row[d] = -1, -1
            A_ub.append(row)
            b_ub.append(-1)
            if mode == CUBICAL:
                row = [0] * (d + 1)
                row[i], row[d] = 1, -1
                A_ub.append(row)
                b_ub.append(0)
        free = ()
    elif target == CLOSED:
        if mode == CUBICAL:
            for i in range(d):
                row = [0] * (d + 1)
                row[i] = 1
                A_ub.append(row)
                b_ub.append(1)
        free = ()
    elif target == SUBSPACE:
        free = tuple(range(d))
    else:
        raise ValueError(f"unknown target {target!r}")
    c = [0] * d + [-1]
    res = maximize(c, A_ub, b_ub, A_eq, b_eq, free=free)
    if res.status != "optimal":
        return None, None
    return 1 + res.value, res.point[:d]


def feasible(orientation: Orientation, s: AffineSubspace, target: str = OPEN, mode: str = CUBICAL) -> bool:
    """Exact strict realisability of an acyclic orientation in the target set."""
    delta, _ = max_slack(s, orientation.arcs, target, mode)
    return delta is not None and delta > 0


def _strictly_ordered(x, arcs) -> bool:
    return all(x[i] < x[j] for i, j in arcs)


def realizable_permutations(s: AffineSubspace, target: str = OPEN, mode: str = CUBICAL,
                            budget: int = DEFAULT_MAX_ORIENTATIONS) -> list[Orientation]:
    """All permutations realisable in the target, by prefix search with LP pruning.

    A prefix ``o_1 .. o_k`` stands for ``x_{o_1} < .. < x_{o_k} < x_j`` for all
    remaining ``j``; an infeasible prefix prunes its whole subtree.  The
    witness of a feasible node certifies its argmin-child without another LP.
    """
    d = s.ambient_dim
    found: list = []

    def arcs_of(prefix):
        rest = [j for j in range(d) if j not in prefix]
        arcs = list(zip(prefix, prefix[1:]))
        if prefix:
            arcs += [(prefix[-1], j) for j in rest]
        return arcs, rest

    def rec(prefix, witness):
        arcs, rest = arcs_of(prefix)
        if len(rest) <= 1:
            found.append(Orientation.from_permutation(prefix + rest))
            if len(found) > budget:
                raise TooLarge(f"more than {budget} realisable orientations")
            return
        free_child = None
        if witness is not None:
            vals = sorted(witness[j] for j in rest)
            if vals[0] < vals[1]:
                free_child = min(rest, key=lambda j: witness[j])
        for j in rest:
            child = prefix + [j]
            if j == free_child:
                rec(child, witness)
                continue
            carcs, _ = arcs_of(child)
            delta, pt = max_slack(s, carcs, target, mode)
            if delta is not None and delta > 0:
                rec(child, pt)

    rec([], None)
    found.sort(key=lambda o: o.order)
    return found


def realizable_orientations(s: AffineSubspace, graph: ForbiddenGraph, target: str = OPEN, mode: str = CUBICAL,
                            budget: int = DEFAULT_MAX_ORIENTATIONS) -> list[Orientation]:
    """Acyclic orientations of ``graph`` realisable in the target (edge-by-edge search)."""
    edges = list(graph.edges)
    d = graph.d
    found: list = []

    def rec(k, arcs, witness):
        if k == len(edges):
            found.append(Orientation(tuple(arcs)))
            if len(found) > budget:
                raise TooLarge(f"more than {budget} realisable orientations")
            return
        i, j = edges[k]
        for arc in ((i, j), (j, i)):
            new = arcs + [arc]
            if witness is not None and witness[arc[0]] < witness[arc[1]]:
                rec(k + 1, new, witness)
                continue
            if not _acyclic(d, new):
                continue
            delta, pt = max_slack(s, new, target, mode)
            if delta is not None and delta > 0:
                rec(k + 1, new, pt)

    rec(0, [], None)
    found.sort(key=lambda o: o.arcs)
    return found


def regions(s: AffineSubspace, graph: ForbiddenGraph, target: str = OPEN, mode: str = CUBICAL,
            budget: int = DEFAULT_MAX_ORIENTATIONS) -> list[Orientation]:
    """Realisable orientations: permutations for complete graphs, else acyclic orientations."""
    if graph.d > 1 and graph.is_complete:
        return realizable_permutations(s, target, mode, budget)
    return realizable_orientations(s, graph, target, mode, budget)


# ------------------------------------------------------------------ flats


@dataclass(frozen=True)
class Flat:
    closure: frozenset  # graph edges whose hyperplane contains the flat
    blocks: tuple  # partition of [d] into graph-connected blocks
    subspace: AffineSubspace
    rank: int


@dataclass
class IntersectionPoset:
    flats: list
    moebius: list
    index: dict = field(default_factory=dict)

    def below(self, a: int, b: int) -> bool:
        """``flats[a] <= flats[b]`` in reverse inclusion order."""
        return self.flats[a].closure <= self.flats[b].closure


def blocks_of(d: int, edges) -> tuple:
    parent = list(range(d))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in edges:
        parent[find(i)] = find(j)
    groups: dict = {}
    for v in range(d):
        groups.setdefault(find(v), []).append(v)
    return tuple(sorted(tuple(g) for g in groups.values()))


def _closure(s: AffineSubspace, graph: ForbiddenGraph) -> frozenset:
    return frozenset(e for e in graph.edges if _vanishes(s, *e))


def _restrict_blocks(s0: AffineSubspace, blocks) -> AffineSubspace:
    d = s0.ambient_dim
    rows = []
    for b in blocks:
        for a, c in zip(b, b[1:]):
            row = [0] * d
            row[a], row[c] = 1, -1
            rows.append(row)
    return s0.restrict(rows) if rows else s0


def intersection_poset(arr: InducedArrangement, P: HPolytope, target: str = OPEN,
                       budget: int = DEFAULT_MAX_FLATS) -> IntersectionPoset:
    """Flats of the induced arrangement meeting ``P°`` (or ``P``), with Möbius values.

    Flats are generated level by level: each flat is cut by every hyperplane
    not already containing it, the result is canonicalised by its edge
    closure, and kept when it meets the target.
    """
    s, graph = arr.subspace, arr.graph
    d = s.ambient_dim

    def meets(u):
        delta = interior_slack(u, P.mode)
        if delta is None:
            return False
        return delta > 0 if target == OPEN else delta >= 0

    bottom_closure = _closure(s, graph)
    bottom = Flat(bottom_closure, blocks_of(d, bottom_closure), s, 0)
    if not meets(s):
        return IntersectionPoset([], [], {})
    flats = [bottom]
    index = {bottom.closure: 0}
    level = [bottom]
    rejected: set = set()
    while level:
        nxt = []
        for f in level:
            for e in arr.hyperplanes:
                if e in f.closure:
                    continue
                u = f.subspace.restrict([_edge_row(d, e)])
                if not u.feasible:
                    continue
                cl = _closure(u, graph)
                if cl in index or cl in rejected:
                    continue
                # canonical subspace from the closure's blocks
                if not meets(u):
                    rejected.add(cl)
                    continue
                g = Flat(cl, blocks_of(d, cl), u, f.rank + 1)
                index[cl] = len(flats)
                flats.append(g)
                nxt.append(g)
                if len(flats) > budget:
                    raise TooLarge(f"more than {budget} flats")
        level = nxt
    # Möbius from the bottom, in rank order
    mu = [0] * len(flats)
    mu[0] = 1
    order = sorted(range(len(flats)), key=lambda i: flats[i].rank)
    for pos, v in enumerate(order):
        if v == 0:
            continue
        cv = flats[v].closure
        mu[v] = -sum(mu[u] for u in order[:pos] if flats[u].rank < flats[v].rank and flats[u].closure <= cv)
    return IntersectionPoset(flats, mu, index)


def _edge_row(d, e):
    row = [0] * d
    row[e[0]], row[e[1]] = 1, -1
    return row


def inside_out_denominator(P: HPolytope, arr: InducedArrangement, budget: int = 2_000_000) -> int:
    """Least ``t`` with every vertex of ``(P, H)`` in ``t^-1 Z^d``."""
    s = P.subspace
    k = s.dim
    if k == 0:
        return lcm(1, *(v.denominator for v in s.particular_point))
    facet_rows = [r for r in _param_rows(P) if any(r[0])]
    hyp_rows = []
    for i, j in arr.hyperplanes:
        coeff = [v[i] - v[j] for v in s.direction_basis]
        const = s.particular_point[i] - s.particular_point[j]
        hyp_rows.append((coeff, const))
    all_rows = facet_rows + hyp_rows
    _check_budget(len(all_rows), k, budget)
    den = 1
    seen = set()
    ineq = _param_rows(P)
    for sub in combinations(range(len(all_rows)), k):
        y = solve_square([all_rows[i][0] for i in sub], [-all_rows[i][1] for i in sub])
        if y is None:
            continue
        key = tuple(y)
        if key in seen:
            continue
        seen.add(key)
        if all(sum((a * v for a, v in zip(coeff, y)), c) >= 0 for coeff, c in ineq):
            x = list(s.particular_point)
            for val, vec in zip(y, s.direction_basis):
                for t in range(len(x)):
                    x[t] += val * vec[t]
            den = lcm(den, *(v.denominator for v in x))
    return den


def transversal(P: HPolytope, arr: InducedArrangement) -> bool:
    """``P`` lies in no hyperplane and every flat meeting ``P`` meets ``P°``."""
    if arr.dropped:
        return False
    closed = intersection_poset(arr, P, target=CLOSED)
    for f in closed.flats:
        delta = interior_slack(f.subspace, P.mode)
        if delta is None or delta <= 0:
            return False
    return True
