"""Exact two-phase simplex with Bland's rule.

The tableau holds integers over one common denominator (integer pivoting):
after each pivot every entry is an exact integer, so no Fraction objects
are built inside the loop.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from .exact import as_fraction


class LPResult:
    __slots__ = ("status", "value", "point")

    def __init__(self, status: str, value: Optional[Fraction] = None, point=None):
        self.status = status  # "optimal" | "infeasible" | "unbounded"
        self.value = value
        self.point = point

    def __repr__(self):
        return f"LPResult({self.status}, {self.value})"


def _int_row(coeffs, rhs):
    vals = [as_fraction(v) for v in coeffs] + [as_fraction(rhs)]
    m = lcm(*(v.denominator for v in vals))
    out = [int(v * m) for v in vals]
    return out[:-1], out[-1]


def maximize(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    free: Sequence[int] = (),
) -> LPResult:
    """Maximise ``c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``.

    Variables are nonnegative except those listed in ``free``.
    """
    n0 = len(c)
    free = sorted(set(free))
    # free variable x_f = x_f+ - x_f-; the minus part is appended as a new column
    extra = {f: n0 + k for k, f in enumerate(free)}
    n = n0 + len(free)

    def widen(row):
        row = list(row)
        row.extend(-row[f] for f in free)
        return row

    cobj = widen([as_fraction(v) for v in c])
    rows: list[list[int]] = []
    rhs: list[int] = []
    slack_sign: list[int] = []  # +1 slack for <=, 0 for equality
    for a, bb in zip(A_ub, b_ub):
        r, v = _int_row(widen(a), bb)
        rows.append(r)
        rhs.append(v)
        slack_sign.append(1)
    for a, bb in zip(A_eq, b_eq):
        r, v = _int_row(widen(a), bb)
        rows.append(r)
        rhs.append(v)
        slack_sign.append(0)
    m = len(rows)

    n_slack = sum(slack_sign)
    # columns: [structural n][slacks][artificials][rhs]
    T: list[list[int]] = []
    basis: list[int] = []
    art_rows = []
    s_col = n
    for i in range(m):
        row = rows[i] + [0] * n_slack
        if slack_sign[i]:
            row[s_col] = 1
            s_col += 1
        b = rhs[i]
        if b < 0 or not slack_sign[i]:
            if b < 0:
                row = [-x for x in row]
                b = -b
            art_rows.append(i)
        T.append(row + [b])
    n_art = len(art_rows)
    ncol = n + n_slack + n_art
    for i in range(m):
        T[i] = T[i][:-1] + [0] * n_art + [T[i][-1]]
    for k, i in enumerate(art_rows):
        T[i][n + n_slack + k] = 1
    s_col = n
    art_of_row = {i: n + n_slack + k for k, i in enumerate(art_rows)}
    for i in range(m):
        if i in art_of_row:
            basis.append(art_of_row[i])
        else:
            # slack column of row i
            basis.append(n + sum(slack_sign[:i]))
    D = 1

    def pivot(r, s):
        nonlocal D
        if T[r][s] < 0:
            T[r] = [-x for x in T[r]]
        P = T[r][s]
        prow = T[r]
        for i in range(len(T)):
            if i == r:
                continue
            row = T[i]
            f = row[s]
            if f == 0:
                if P != D:
                    T[i] = [(x * P) // D for x in row]
                continue
            T[i] = [(x * P - f * y) // D for x, y in zip(row, prow)]
        D = P
        basis[r] = s

    def run(obj_index, allowed):
        # Bland's rule; the objective row is T[obj_index]
        while True:
            obj = T[obj_index]
            s = next((j for j in allowed if obj[j] > 0), None)
            if s is None:
                return "optimal"
            best = None
            for i in range(m):
                a = T[i][s]
                if a > 0:
                    if best is None:
                        best = i
                    else:
                        lhs = T[i][-1] * T[best][s]
                        rhs_ = T[best][-1] * a
                        if lhs < rhs_ or (lhs == rhs_ and basis[i] < basis[best]):
                            best = i
            if best is None:
                return "unbounded"
            pivot(best, s)

    if n_art:
        # phase 1: maximise -(sum of artificials); reduced costs = column sums over artificial rows
        ob = [0] * (ncol + 1)
        for i in art_rows:
            for j, x in enumerate(T[i]):
                ob[j] += x
        for j in range(n + n_slack, ncol):
            ob[j] = 0
        T.append(ob)
        run(m, range(n + n_slack))
        if T[m][-1] != 0:
            return LPResult("infeasible")
        T.pop()
        # drive remaining artificials out of the basis
        keep = []
        for i in range(m):
            if basis[i] >= n + n_slack:
                s = next((j for j in range(n + n_slack) if T[i][j] != 0), None)
                if s is None:
                    continue  # redundant equality
                pivot(i, s)
            keep.append(i)
        T[:] = [T[i] for i in keep]
        basis[:] = [basis[i] for i in keep]
        m = len(T)
        T[:] = [row[: n + n_slack] + [row[-1]] for row in T]
    ncol = n + n_slack

    cden = lcm(*(v.denominator for v in cobj)) if cobj else 1
    cint = [int(v * cden) for v in cobj] + [0] * n_slack
    # reduced costs r_j = c_j - c_B B^-1 A_j, scaled by D (rhs entry is -z)
    ob = [cint[j] * D for j in range(ncol)] + [0]
    for i in range(m):
        cb = cint[basis[i]]
        if cb:
            row = T[i]
            for j in range(ncol + 1):
                ob[j] -= cb * row[j]
    T.append(ob)
    status = run(m, range(ncol))
    if status == "unbounded":
        return LPResult("unbounded")
    value = Fraction(-T[m][-1], D * cden)
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = Fraction(T[i][-1], D)
    for f, k in extra.items():
        x[f] -= x[k]
    return LPResult("optimal", value, x[:n0])
