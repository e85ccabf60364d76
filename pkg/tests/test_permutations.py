from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from insideout.arrangement import CLOSED, OPEN, SUBSPACE
from insideout.errors import TooLarge
from insideout.permutations import (all_position_arrays, antichain, antichain_mask, conjecture_report,
                                    dominance_leq_forms, dominance_leq_sets, feasible_preorder,
                                    realizable_set, realizable_sets)

import oracles


def square_symmetries(n):
    """The 8 symmetries of an n x n board as permutations of row-major cells."""
    maps = [
        lambda r, c: (r, c), lambda r, c: (c, n - 1 - r), lambda r, c: (n - 1 - r, n - 1 - c),
        lambda r, c: (n - 1 - c, r), lambda r, c: (r, n - 1 - c), lambda r, c: (n - 1 - r, c),
        lambda r, c: (c, r), lambda r, c: (n - 1 - c, n - 1 - r),
    ]
    out = []
    for f in maps:
        perm = [0] * (n * n)
        for r in range(n):
            for c in range(n):
                a, b = f(r, c)
                perm[r * n + c] = a * n + b
        out.append(perm)
    return out


def sigma_from_positions(pos):
    return tuple(sorted(range(len(pos)), key=lambda i: pos[i]))


def test_dominance_examples():
    sigma = (0, 1, 2, 3)  # identity: position of point i is i + 1
    assert dominance_leq_sets(sigma, {0, 1}, {2, 3})
    assert not dominance_leq_sets(sigma, {2, 3}, {0, 1})
    assert dominance_leq_sets(sigma, {3}, {0, 3})  # smaller set with dominated entries
    assert not dominance_leq_sets(sigma, {0, 3}, {3})
    assert not dominance_leq_sets(sigma, {0, 3}, {1, 2}) and not dominance_leq_sets(sigma, {1, 2}, {0, 3})
    assert antichain(sigma, [{0, 3}, {1, 2}])
    assert not antichain(sigma, [{0, 1}, {2, 3}])


def test_set_and_form_orders_agree():
    d = 4
    subsets = [frozenset(c) for k in range(1, d + 1) for c in combinations(range(d), k)]
    for sigma in permutations(range(d)):
        for L in subsets:
            for Lp in subsets:
                f = [int(i in L) for i in range(d)]
                fp = [int(i in Lp) for i in range(d)]
                assert dominance_leq_sets(sigma, L, Lp) == dominance_leq_forms(sigma, f, fp)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5).flatmap(lambda d: st.tuples(
    st.permutations(range(d)),
    st.lists(st.lists(st.integers(0, 3), min_size=d, max_size=d), min_size=1, max_size=4),
)))
def test_vectorised_mask_matches_pairwise(data):
    sigma, forms = data
    d = len(sigma)
    pos = np.array([[0] * d], dtype=np.int8)
    for k, i in enumerate(sigma):
        pos[0, i] = k + 1
    distinct = [list(f) for f in {tuple(f) for f in forms}]
    assert bool(antichain_mask(pos, distinct)[0]) == antichain(sigma, distinct)


def test_position_arrays():
    pos = all_position_arrays(3)
    assert pos.shape == (6, 3)
    assert sorted(map(tuple, pos)) == sorted(permutations((1, 2, 3)))
    with pytest.raises(TooLarge):
        all_position_arrays(11, limit=1000)


def test_magic3_realizable_permutations_are_two_patterns():
    p = oracles.problem("magic", (3,))
    got = {o.order for o in realizable_set(p)}
    a = [4, 9, 2, 3, 5, 7, 8, 1, 6]
    b = [3, 9, 2, 4, 5, 6, 8, 1, 7]
    expected = set()
    for pat in (a, b):
        for g in square_symmetries(3):
            moved = [0] * 9
            for cell in range(9):
                moved[g[cell]] = pat[cell]
            expected.add(sigma_from_positions(moved))
    assert len(expected) == 16 and got == expected


@pytest.mark.parametrize("fam,n", [("magic", 3), ("magilatin_square", 2),
                                   pytest.param("magilatin_square", 3, marks=pytest.mark.slow)])
def test_realizable_set_invariant_under_symmetries(fam, n):
    got = {o.order for o in realizable_set(oracles.problem(fam, (n,)))}
    for g in square_symmetries(n):
        moved = {tuple(g[i] for i in s) for s in got}
        assert moved == got


@pytest.mark.parametrize("fam,n", [("magic", 3), ("magilatin_square", 2)])
def test_cubical_targets_agree(fam, n):
    # the cube and the subspace realise the same orders: scale a point of s into the cube
    sets = realizable_sets(oracles.problem(fam, (n,)))
    op, cl, sub = ({o.order for o in sets[k]} for k in (OPEN, CLOSED, SUBSPACE))
    assert op == cl == sub


def test_affine_targets_nest():
    sets = realizable_sets(oracles.problem("magic", (3,), "affine"))
    op, cl, sub = ({o.order for o in sets[k]} for k in (OPEN, CLOSED, SUBSPACE))
    assert op <= cl <= sub


@pytest.mark.parametrize("p", [oracles.problem("magic", (3,)), oracles.problem("magilatin_square", (2,)),
                               oracles.problem("magilatin_rectangle", (2, 3))], ids=lambda p: p.name)
def test_realizable_implies_antichain(p):
    rep = conjecture_report(p)
    assert rep.applicable
    assert not [s for s, w in rep.counterexamples if w == "realizable-only"]


def test_conjecture_magic3():
    rep = conjecture_report(oracles.problem("magic", (3,)))
    assert len(rep.realizable) == 16
    assert rep.to_json()["realizable_count"] == 16


@pytest.mark.slow
def test_conjecture_semimagic3():
    p = oracles.problem("semimagic", (3,))
    rep = conjecture_report(p)
    assert len(rep.realizable) == 1296
    assert rep.agreement, rep.counterexamples[:5]


def test_feasible_preorder():
    p = oracles.problem("magilatin_square", (2,), "cubical", "none")
    # all four entries equal is realised by the constant square
    assert feasible_preorder(p, [[0, 1, 2, 3]])
    # cells 0 and 3 tied below tied 1 and 2: a valid magilatin shape
    assert feasible_preorder(p, [[0, 3], [1, 2]])
    # x0 < x1 < x2 < x3 contradicts x0 + x1 = x2 + x3
    assert not feasible_preorder(p, [[0], [1], [2], [3]])
