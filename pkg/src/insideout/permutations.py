"""Realizable permutations, reverse dominance orders, and the antichain conjecture engine.

A permutation ``sigma`` lists the points in increasing order of value; the
position of point ``i`` is its 1-based rank.  Positions arrays follow the
diagram convention: the largest value sits at position ``d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations as _perms
from math import factorial, lcm
from typing import Optional, Sequence

import numpy as np

from .arrangement import CLOSED, OPEN, SUBSPACE, Orientation, max_slack, realizable_permutations
from .clutters import InsideOutProblem
from .errors import TooLarge
from .exact import as_fraction


def _positions(sigma: Sequence[int]) -> list:
    pos = [0] * len(sigma)
    for k, i in enumerate(sigma):
        pos[i] = k + 1
    return pos


def dominance_leq_sets(sigma: Sequence[int], L, Lp) -> bool:
    """``L <= L'`` in the reverse dominance order of ``sigma`` (0-based points)."""
    pos = _positions(sigma)
    j = sorted((pos[i] for i in L), reverse=True)
    jp = sorted((pos[i] for i in Lp), reverse=True)
    return len(j) <= len(jp) and all(a <= b for a, b in zip(j, jp))


def dominance_leq_forms(sigma: Sequence[int], f, fp) -> bool:
    """Suffix sums of ``f`` along ``sigma`` never exceed those of ``f'``."""
    a = [as_fraction(f[i]) for i in sigma]
    b = [as_fraction(fp[i]) for i in sigma]
    sa = sb = Fraction(0)
    for x, y in zip(reversed(a), reversed(b)):
        sa += x
        sb += y
        if sa > sb:
            return False
    return True


def _is_set_family(members) -> bool:
    return all(isinstance(m, (set, frozenset)) for m in members)


def antichain(sigma: Sequence[int], members) -> bool:
    """No two distinct members (point sets or positive forms) are comparable."""
    members = list(members)
    leq = dominance_leq_sets if _is_set_family(members) else dominance_leq_forms
    for a in range(len(members)):
        for b in range(len(members)):
            if a != b and members[a] != members[b] and leq(sigma, members[a], members[b]):
                return False
    return True


# ------------------------------------------------------------------ vectorised sweep


def all_position_arrays(d: int, limit: int = 10**7) -> np.ndarray:
    """Position arrays of every permutation of ``[d]``, in lexicographic order of ``sigma``."""
    if factorial(d) > limit:
        raise TooLarge(f"{d}! permutations exceed the sweep limit {limit}")
    sig = np.array(list(_perms(range(d))), dtype=np.int8).reshape(-1, d)
    pos = np.empty_like(sig)
    rows = np.arange(len(sig))[:, None]
    pos[rows, sig] = np.arange(1, d + 1, dtype=np.int8)[None, :]
    return pos


def _form_matrix(forms) -> np.ndarray:
    fr = [[as_fraction(a) for a in f] for f in forms]
    den = lcm(1, *(a.denominator for f in fr for a in f))
    return np.array([[int(a * den) for a in f] for f in fr], dtype=np.int64)


def antichain_mask(pos: np.ndarray, forms, classes: Optional[Sequence] = None) -> np.ndarray:
    """Vectorised antichain test of nonnegative ``forms`` for every row of ``pos``.

    Members are compared only within the same class.  For 0/1 forms this is
    the set version of the order.
    """
    F = _form_matrix(forms)
    m, d = F.shape
    classes = list(classes) if classes is not None else [0] * m
    # S[f, perm, k] = sum of coefficients at positions >= k
    order = np.argsort(pos, axis=1)  # order[perm, k] = point at position k+1
    S = np.empty((m, len(pos), d), dtype=np.int64)
    for a in range(m):
        coeff = F[a][order]
        S[a] = np.cumsum(coeff[:, ::-1], axis=1)[:, ::-1]
    ok = np.ones(len(pos), dtype=bool)
    for a in range(m):
        for b in range(m):
            if a == b or classes[a] != classes[b] or (F[a] == F[b]).all():
                continue
            ok &= ~(S[a] <= S[b]).all(axis=1)
    return ok


# ------------------------------------------------------------------ realizability


def realizable_set(problem: InsideOutProblem, target: str = OPEN) -> list[Orientation]:
    """Permutations realizable in ``P°`` (positive points), ``P``, or ``s``.

    Always a permutation sweep, whatever the distinctness regime, since the
    conjecture speaks of total orders.
    """
    if target == OPEN and problem.graph.is_complete:
        return list(problem.regions)
    return realizable_permutations(problem.subspace, target, problem.polytope_mode,
                                   problem.budgets.max_orientations)


def realizable_sets(problem: InsideOutProblem) -> dict:
    """The three sets of realizable permutations, keyed ``open``/``closed``/``subspace``."""
    return {t: realizable_set(problem, t) for t in (OPEN, CLOSED, SUBSPACE)}


def feasible_preorder(problem: InsideOutProblem, blocks: Sequence[Sequence[int]], target: str = OPEN) -> bool:
    """Experimental: realizability of a total preorder given as increasing blocks of tied points."""
    ties = [(b[0], j) for b in blocks for j in b[1:]]
    arcs = [(a[0], b[0]) for a, b in zip(blocks, blocks[1:])]
    delta, _ = max_slack(problem.subspace, arcs, target, problem.polytope_mode, extra_eq=ties)
    return delta is not None and delta > 0


def _conjecture_forms(problem: InsideOutProblem):
    if problem.clutter is not None:
        members = [[1 if i in L else 0 for i in range(problem.d)] for L in problem.clutter.lines]
        return members, list(problem.clutter.classes)
    return [list(f) for f in problem.system.forms], list(problem.system.classes)


@dataclass
class ConjectureReport:
    problem: str
    realizable: list  # sigma tuples
    antichain: list
    counterexamples: list = field(default_factory=list)
    applicable: bool = True
    note: str = ""

    @property
    def agreement(self) -> bool:
        return self.applicable and not self.counterexamples

    def to_json(self) -> dict:
        return {
            "problem": self.problem,
            "applicable": self.applicable,
            "realizable_count": len(self.realizable),
            "antichain_count": len(self.antichain),
            "agreement": self.agreement,
            "counterexamples": [{"positions": list(_positions(s)), "in": w} for s, w in self.counterexamples],
            "note": self.note,
        }


def conjecture_report(problem: InsideOutProblem, sweep_limit: int = 10**7) -> ConjectureReport:
    """Compare positively realizable permutations with the antichain predicate."""
    forms, classes = _conjecture_forms(problem)
    if any(as_fraction(a) < 0 for f in forms for a in f):
        return ConjectureReport(problem.name, [], [], applicable=False, note="forms are not positive")
    real = sorted(o.order for o in realizable_set(problem, OPEN))
    pos = all_position_arrays(problem.d, sweep_limit)
    mask = antichain_mask(pos, forms, classes)
    order = np.argsort(pos[mask], axis=1)
    anti = sorted(tuple(int(v) for v in row) for row in order)
    rs, as_ = set(real), set(anti)
    cex = sorted([(s, "realizable-only") for s in rs - as_] + [(s, "antichain-only") for s in as_ - rs])
    return ConjectureReport(problem.name, real, anti, cex)
