"""Covering clutters, form systems and the assembled counting problems."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Optional, Sequence

from .arrangement import (
    DEFAULT_MAX_ORIENTATIONS,
    OPEN,
    ForbiddenGraph,
    InducedArrangement,
    induce,
    inside_out_denominator,
    intersection_poset,
    regions,
    transversal,
)
from .errors import InfeasibleSystem, NoStrongLabelling, SchemaError
from .exact import AffineSubspace, as_fraction, solve_affine
from .polytope import CUBICAL, ORTHANT, HPolytope, build_polytope, normalized_volume, require_nondegenerate, vertices

MODES = ("cubical", "affine")
DISTINCTNESS = ("all", "line", "none")
SYMMETRIES = ("none", "cubical", "affine")

DEFAULT_MAX_POINTS = 10**8


@dataclass(frozen=True)
class CoveringClutter:
    """Lines over points ``0..d-1``; ``classes[k]`` tags line ``k``."""

    d: int
    lines: tuple
    classes: tuple

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("a clutter needs at least one point")
        if len(self.classes) != len(self.lines):
            raise ValueError("one class label per line")
        covered = set()
        for k, L in enumerate(self.lines):
            if not L:
                raise ValueError(f"line {k + 1} is empty")
            if any(not 0 <= p < self.d for p in L):
                raise ValueError(f"line {k + 1} has a point outside 1..{self.d}")
            covered.update(L)
        for a, b in combinations(range(len(self.lines)), 2):
            if self.classes[a] != self.classes[b]:
                continue
            A, B = set(self.lines[a]), set(self.lines[b])
            if A <= B or B <= A:
                raise ValueError(f"lines {a + 1} and {b + 1} are nested")
        if covered != set(range(self.d)):
            raise ValueError("lines do not cover every point")

    @classmethod
    def single(cls, d: int, lines) -> "CoveringClutter":
        lines = _dedupe(lines)
        return cls(d, lines, (0,) * len(lines))

    @classmethod
    def multiple(cls, d: int, line_classes) -> "CoveringClutter":
        lines, tags = [], []
        for c, group in enumerate(line_classes):
            for L in _dedupe(group):
                lines.append(L)
                tags.append(c)
        return cls(d, tuple(lines), tuple(tags))

    def forms(self):
        out = []
        for L in self.lines:
            v = [Fraction(0)] * self.d
            for p in L:
                v[p] = Fraction(1)
            out.append(tuple(v))
        return tuple(out)


def _dedupe(lines):
    seen, out = set(), []
    for L in lines:
        key = tuple(sorted(set(L)))
        if key not in seen:
            seen.add(key)
            out.append(key)
    return tuple(out)


@dataclass(frozen=True)
class FormSystem:
    forms: tuple  # coefficient tuples of Fractions
    classes: tuple
    targets: tuple  # affine right-hand sides

    def __post_init__(self):
        if not self.forms:
            raise ValueError("at least one form is required")
        d = len(self.forms[0])
        if any(len(f) != d for f in self.forms):
            raise ValueError("forms have different lengths")
        for i in range(d):
            if all(f[i] == 0 for f in self.forms):
                raise ValueError(f"variable {i + 1} appears in no form")

    @property
    def d(self) -> int:
        return len(self.forms[0])

    @property
    def weights(self) -> tuple:
        return tuple(sum(f, Fraction(0)) for f in self.forms)

    @classmethod
    def from_clutter(cls, c: CoveringClutter) -> "FormSystem":
        return cls(c.forms(), c.classes, (Fraction(1),) * len(c.lines))


def grid_symmetry_rows(n: int, value) -> tuple[list, list]:
    """``x_ij + x_{n+1-i, n+1-j} = value`` for every opposite pair (and the centre)."""
    d = n * n
    rows, rhs, seen = [], [], set()
    for i in range(n):
        for j in range(n):
            a, b = i * n + j, (n - 1 - i) * n + (n - 1 - j)
            key = (min(a, b), max(a, b))
            if key in seen:
                continue
            seen.add(key)
            row = [0] * d
            row[a] += 1
            row[b] += 1
            rows.append(row)
            rhs.append(value)
    return rows, rhs


def magic_subspace(system: FormSystem, mode: str, symmetry: str = "none", n: Optional[int] = None) -> AffineSubspace:
    """Equal forms (homogeneous, per class) or forms equal to their targets (affine)."""
    d = system.d
    rows, rhs = [], []
    if mode == "cubical":
        firsts: dict = {}
        for f, c in zip(system.forms, system.classes):
            if c not in firsts:
                firsts[c] = f
                continue
            rows.append([a - b for a, b in zip(f, firsts[c])])
            rhs.append(Fraction(0))
    elif mode == "affine":
        for f, tgt in zip(system.forms, system.targets):
            rows.append(list(f))
            rhs.append(tgt)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if symmetry != "none":
        if n is None or n * n != d:
            raise ValueError("symmetry needs an n x n grid")
        value = Fraction(1) if symmetry == "cubical" else Fraction(2, n)
        srows, srhs = grid_symmetry_rows(n, value)
        rows += srows
        rhs += srhs
    s = solve_affine(rows, rhs, d) if rows else solve_affine([], [], d)
    if not s.feasible:
        raise InfeasibleSystem("the magic equations are inconsistent")
    return s


def gamma_graph(clutter_or_forms) -> ForbiddenGraph:
    """Union of cliques on the lines (supports, for forms)."""
    if isinstance(clutter_or_forms, CoveringClutter):
        d, supports = clutter_or_forms.d, clutter_or_forms.lines
    else:
        d = clutter_or_forms.d
        supports = [tuple(i for i, a in enumerate(f) if a != 0) for f in clutter_or_forms.forms]
    edges = set()
    for L in supports:
        edges.update(combinations(sorted(L), 2))
    return ForbiddenGraph.from_edges(d, edges)


@dataclass(frozen=True)
class Budgets:
    max_points: int = DEFAULT_MAX_POINTS
    max_orientations: int = DEFAULT_MAX_ORIENTATIONS


@dataclass(eq=False)
class InsideOutProblem:
    """A magic-type counting problem: subspace, polytope and forbidden graph."""

    name: str
    system: FormSystem
    mode: str
    distinctness: str
    symmetry: str
    subspace: AffineSubspace
    polytope: HPolytope
    graph: ForbiddenGraph
    arrangement: InducedArrangement
    clutter: Optional[CoveringClutter] = None
    n: Optional[int] = None
    budgets: Budgets = field(default_factory=Budgets)

    @property
    def d(self) -> int:
        return self.subspace.ambient_dim

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @property
    def period(self) -> int:
        return self.subspace.period

    @property
    def polytope_mode(self) -> str:
        return self.polytope.mode

    @property
    def constant_weight(self) -> bool:
        """Difference forms have weight zero (cubical) / all weights equal and positive (affine)."""
        w = self.system.weights
        if self.mode == "cubical":
            by_class: dict = {}
            for c, x in zip(self.system.classes, w):
                by_class.setdefault(c, set()).add(x)
            return all(len(v) == 1 for v in by_class.values())
        return len(set(w)) == 1 and w[0] > 0

    @cached_property
    def vertex_set(self):
        return vertices(self.polytope)

    @cached_property
    def volume(self) -> Fraction:
        return normalized_volume(self.polytope, self.period, self.vertex_set)

    @cached_property
    def regions(self):
        """Orientations realisable in ``P°`` (permutations when every pair is forbidden)."""
        return regions(self.subspace, self.graph, OPEN, self.polytope_mode, self.budgets.max_orientations)

    @cached_property
    def poset(self):
        return intersection_poset(self.arrangement, self.polytope, OPEN)

    @cached_property
    def io_denominator(self) -> int:
        return inside_out_denominator(self.polytope, self.arrangement)

    @cached_property
    def is_transversal(self) -> bool:
        return transversal(self.polytope, self.arrangement)

    def with_distinctness(self, distinctness: str) -> "InsideOutProblem":
        return assemble(self.name, self.system, self.mode, distinctness, self.symmetry,
                        clutter=self.clutter, n=self.n, budgets=self.budgets)


def _graph_for(distinctness, system, clutter) -> ForbiddenGraph:
    d = system.d
    if distinctness == "all":
        return ForbiddenGraph.complete(d)
    if distinctness == "line":
        return gamma_graph(clutter if clutter is not None else system)
    if distinctness == "none":
        return ForbiddenGraph.empty(d)
    raise ValueError(f"unknown distinctness {distinctness!r}")


def assemble(name, system: FormSystem, mode: str, distinctness: str, symmetry: str = "none", *,
             clutter=None, n=None, budgets: Budgets = Budgets(), check: bool = True) -> InsideOutProblem:
    """Build subspace, polytope, graph and induced arrangement.

    Raises:
        DegeneratePolytope: ``P`` lies in a coordinate hyperplane.
        NoStrongLabelling: some forbidden pair is forced equal on the subspace.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if symmetry not in SYMMETRIES:
        raise ValueError(f"unknown symmetry {symmetry!r}")
    s = magic_subspace(system, mode, symmetry, n)
    P = build_polytope(s, CUBICAL if mode == "cubical" else ORTHANT)
    graph = _graph_for(distinctness, system, clutter)
    arr = induce(graph, s)
    if check:
        require_nondegenerate(P)
        if arr.dropped:
            pairs = ", ".join(f"{i + 1}={j + 1}" for i, j in arr.dropped[:4])
            raise NoStrongLabelling(f"forced equalities on the subspace: {pairs}")
    return InsideOutProblem(name, system, mode, distinctness, symmetry, s, P, graph, arr, clutter, n, budgets)


# ---------------------------------------------------------------- families


def _cell(n, i, j):
    return i * n + j


def square_lines(n: int, diagonals: str = "none"):
    rows = [tuple(_cell(n, i, j) for j in range(n)) for i in range(n)]
    cols = [tuple(_cell(n, i, j) for i in range(n)) for j in range(n)]
    lines = rows + cols
    if diagonals == "main":
        lines.append(tuple(_cell(n, i, i) for i in range(n)))
        lines.append(tuple(_cell(n, i, n - 1 - i) for i in range(n)))
    elif diagonals == "wrapped":
        for k in range(n):
            lines.append(tuple(_cell(n, i, (i + k) % n) for i in range(n)))
        for k in range(n):
            lines.append(tuple(_cell(n, i, (k - i) % n) for i in range(n)))
    return lines


FAMILIES = {
    "magic": (1, "all"),
    "semimagic": (1, "all"),
    "pandiagonal": (1, "all"),
    "magilatin_square": (1, "line"),
    "magilatin_rectangle": (2, "line"),
}


def family_clutter(family: str, params: Sequence[int]) -> tuple[CoveringClutter, Optional[int]]:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(sorted(FAMILIES))}")
    nparams, _ = FAMILIES[family]
    if len(params) != nparams or any(int(p) < 1 for p in params):
        raise ValueError(f"{family} takes {nparams} positive integer parameter(s)")
    if family == "magilatin_rectangle":
        m, n = (int(p) for p in params)
        rows = [tuple(i * n + j for j in range(n)) for i in range(m)]
        cols = [tuple(i * n + j for i in range(m)) for j in range(n)]
        return CoveringClutter.multiple(m * n, [rows, cols]), (n if m == n else None)
    (n,) = (int(p) for p in params)
    diag = {"magic": "main", "pandiagonal": "wrapped"}.get(family, "none")
    return CoveringClutter.single(n * n, square_lines(n, diag)), n


def builtin(family: str, params: Sequence[int], mode: str = "cubical", distinctness: Optional[str] = None,
            symmetry: str = "none", budgets: Budgets = Budgets()) -> InsideOutProblem:
    """One of the named square/rectangle families as a ready problem."""
    clutter, n = family_clutter(family, params)
    distinctness = distinctness or FAMILIES[family][1]
    name = f"{family}({','.join(str(int(p)) for p in params)})"
    return assemble(name, FormSystem.from_clutter(clutter), mode, distinctness, symmetry,
                    clutter=clutter, n=n, budgets=budgets)


def from_config(doc: dict) -> InsideOutProblem:
    """Problem from a validated document (see :mod:`insideout.schema`)."""
    from .schema import validate

    validate(doc)
    b = doc.get("budgets", {})
    budgets = Budgets(b.get("max_points", DEFAULT_MAX_POINTS), b.get("max_orientations", DEFAULT_MAX_ORIENTATIONS))
    if "builtin" in doc:
        spec = doc["builtin"]
        return builtin(spec["family"], spec.get("params", []), spec.get("mode", "cubical"),
                       spec.get("distinctness"), spec.get("symmetry", "none"), budgets)
    ex = doc["explicit"]
    d = ex["d"]
    mode = ex.get("mode", "cubical")
    distinctness = ex.get("distinctness", "all")
    symmetry = ex.get("symmetry", "none")
    n = None
    if symmetry != "none":
        n = round(d**0.5)
        if n * n != d:
            raise SchemaError("symmetry needs d to be a perfect square", "explicit.symmetry")
    clutter = None
    try:
        if "forms" in ex:
            forms, targets = [], []
            for k, f in enumerate(ex["forms"]):
                coeffs = tuple(as_fraction(v) for v in f["coeffs"])
                if len(coeffs) != d:
                    raise SchemaError(f"expected {d} coefficients", f"explicit.forms[{k}].coeffs")
                forms.append(coeffs)
                if "target" in f and mode != "affine":
                    raise SchemaError("targets only apply in affine mode", f"explicit.forms[{k}].target")
                targets.append(as_fraction(f.get("target", 1)))
            classes = tuple(f.get("class", 1) for f in ex["forms"])
            system = FormSystem(tuple(forms), classes, tuple(targets))
        else:
            groups = ex["classes"] if "classes" in ex else [ex["lines"]]
            zero_based = [[[p - 1 for p in L] for L in g] for g in groups]
            for gi, g in enumerate(groups):
                for li, L in enumerate(g):
                    for p in L:
                        if not 1 <= p <= d:
                            loc = f"explicit.classes[{gi}][{li}]" if "classes" in ex else f"explicit.lines[{li}]"
                            raise SchemaError(f"point {p} outside 1..{d}", loc)
            clutter = CoveringClutter.multiple(d, zero_based)
            system = FormSystem.from_clutter(clutter)
    except SchemaError:
        raise
    except (ValueError, ArithmeticError) as exc:
        raise SchemaError(str(exc), "explicit") from exc
    name = ex.get("name", "explicit")
    return assemble(name, system, mode, distinctness, symmetry, clutter=clutter, n=n, budgets=budgets)
