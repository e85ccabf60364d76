from fractions import Fraction
from itertools import permutations, product

import pytest

from insideout.clutters import (Budgets, CoveringClutter, FormSystem, builtin, family_clutter, from_config,
                                gamma_graph, magic_subspace)
from insideout.counting import count_open
from insideout.errors import DegeneratePolytope, NoStrongLabelling, SchemaError
from insideout.polytope import contains

import oracles


def test_magic3_cubical_shape():
    p = oracles.problem("magic", (3,))
    assert (p.d, p.dim, p.period) == (9, 3, 1)
    assert p.graph.is_complete and len(p.graph.edges) == 36


def test_rectangle_shape():
    p = oracles.problem("magilatin_rectangle", (2, 3))
    assert (p.d, p.dim) == (6, 3)
    degrees = sorted(len(a) for a in p.graph.adjacency())
    assert degrees == [3] * 6  # two K3 rows plus one K2 per column
    assert len(p.graph.edges) == 9


def test_semimagic3_dimension():
    assert oracles.problem("semimagic", (3,)).dim == 5


def test_pandiagonal_lines():
    clutter, n = family_clutter("pandiagonal", (4,))
    assert n == 4 and len(clutter.lines) == 4 + 4 + 8
    p = builtin("pandiagonal", (4,), distinctness="none")
    assert p.dim > 0


def test_semimagic2_subspace():
    clutter, _ = family_clutter("semimagic", (2,))
    s = magic_subspace(FormSystem.from_clutter(clutter), "cubical")
    assert s.dim == 2
    for v in s.direction_basis:
        assert v[0] == v[3] and v[1] == v[2]


def test_semimagic2_all_distinct_is_impossible():
    with pytest.raises(NoStrongLabelling):
        builtin("semimagic", (2,))


def test_cubical_symmetry_contains_half_point():
    p = builtin("magic", (3,), symmetry="cubical")
    base = oracles.problem("magic", (3,))
    assert p.dim < base.dim
    half = [Fraction(1, 2)] * 9
    assert contains(p.polytope, half)
    assert all(half[i] == half[j] for i, j in p.graph.edges)


def test_affine_symmetry_centre_value():
    p = builtin("magic", (3,), mode="affine", symmetry="affine")
    centre = [v[4] for v in p.subspace.direction_basis]
    assert not any(centre) and p.subspace.particular_point[4] == Fraction(1, 3)


def test_gamma_graphs():
    line = CoveringClutter.single(3, [(0, 1, 2)])
    assert len(gamma_graph(line).edges) == 3
    clutter, _ = family_clutter("magilatin_square", (2,))
    g = gamma_graph(clutter)
    assert sorted(len(a) for a in g.adjacency()) == [2, 2, 2, 2] and len(g.edges) == 4


def test_clutter_validation():
    with pytest.raises(ValueError):
        CoveringClutter.single(3, [(0, 1), ()])
    with pytest.raises(ValueError):
        CoveringClutter.single(3, [(0, 1), (0, 1, 2)])
    with pytest.raises(ValueError):
        CoveringClutter.single(3, [(0, 1)])
    # nesting across classes is allowed
    CoveringClutter.multiple(2, [[(0, 1)], [(0,), (1,)]])


def test_config_round_trip():
    a = from_config({"builtin": {"family": "magic", "params": [3]}})
    b = oracles.problem("magic", (3,))
    assert a.name == b.name and a.subspace.equations == b.subspace.equations
    assert a.graph == b.graph


def test_config_triangle():
    doc = {"explicit": {"d": 3, "lines": [[1, 2], [2, 3], [1, 3]], "mode": "affine", "distinctness": "none"}}
    p = from_config(doc)
    assert p.dim == 0 and p.period == 2
    doc["explicit"].pop("distinctness")
    with pytest.raises(NoStrongLabelling):
        from_config(doc)


def test_config_forms_unequal_weight():
    doc = {"explicit": {"d": 3, "mode": "affine",
                        "forms": [{"coeffs": [1, 2, 0]}, {"coeffs": [0, "1/2", 1], "target": 1}]}}
    p = from_config(doc)
    assert not p.constant_weight


def test_config_errors_have_locations():
    with pytest.raises(SchemaError) as e:
        from_config({"explicit": {"d": 3, "lines": [[1, 2], []]}})
    assert e.value.location == "explicit.lines[1]"
    with pytest.raises(SchemaError) as e:
        from_config({"explicit": {"d": 3, "lines": [[1, 4]]}})
    assert e.value.location == "explicit.lines[0]"
    with pytest.raises(SchemaError) as e:
        from_config({"explicit": {"d": 2, "forms": [{"coeffs": [1, 1], "target": 2}]}})
    assert "affine" in str(e.value)
    with pytest.raises(SchemaError):
        from_config({"builtin": {"family": "magic", "params": [3]}, "explicit": {"d": 1, "lines": [[1]]}})


def test_config_budgets():
    p = from_config({"builtin": {"family": "magic", "params": [3]}, "budgets": {"max_points": 5}})
    assert p.budgets == Budgets(5, Budgets().max_orientations)


def test_degenerate_polytope_rejected():
    # x1 + x2 = 0 in the orthant pins both coordinates to zero
    doc = {"explicit": {"d": 2, "mode": "affine", "distinctness": "none",
                        "forms": [{"coeffs": [1, 1], "target": 0}, {"coeffs": [0, 1], "target": 0}]}}
    with pytest.raises(DegeneratePolytope):
        from_config(doc)


def test_constant_line_size_is_transverse():
    for fam in ("magic", "semimagic"):
        p = oracles.problem(fam, (3,))
        assert p.constant_weight and p.is_transversal


@pytest.mark.parametrize("fam", ["magic", "semimagic"])
def test_cubical_and_affine_posets_match(fam):
    a = oracles.problem(fam, (3,))
    b = oracles.problem(fam, (3,), "affine")
    ma = {f.closure: m for f, m in zip(a.poset.flats, a.poset.moebius)}
    mb = {f.closure: m for f, m in zip(b.poset.flats, b.poset.moebius)}
    assert ma == mb


def _latin_squares(n):
    rows = list(permutations(range(1, n + 1)))
    out = 0
    for choice in product(rows, repeat=n):
        if all(len({r[j] for r in choice}) == n for j in range(n)):
            out += 1
    return out


@pytest.mark.parametrize("n", [2, 3])
def test_magilatin_with_entries_in_1_to_n_are_latin_squares(n):
    p = oracles.problem("magilatin_square", (n,))
    assert count_open(p, n + 1) == _latin_squares(n) == {2: 2, 3: 12}[n]
