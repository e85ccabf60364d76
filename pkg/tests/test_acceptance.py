"""The ten acceptance criteria, all exact.  Each records one pass/fail line for the terminal summary."""

import json
import subprocess
import sys
from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest

from conftest import ACCEPTANCE
from insideout import counting as C
from insideout.cli import moebius_identity_holds
from insideout.errors import NotConstantWeight, NotTransverse
from insideout.permutations import antichain_mask, conjecture_report, realizable_set, _conjecture_forms
from insideout.polytope import normalized_volume
from insideout.quasipoly import fit

import oracles
from test_permutations import sigma_from_positions, square_symmetries


class Criterion:
    def __init__(self, n):
        self.n = n
        self.checks = []

    def check(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))

    def finish(self):
        failed = [(n, d) for n, ok, d in self.checks if not ok]
        text = f"{len(self.checks) - len(failed)}/{len(self.checks)} checks"
        if failed:
            text += "; failed: " + "; ".join(f"{n} ({d})" if d else n for n, d in failed)
        ACCEPTANCE[self.n] = (not failed, text)
        assert not failed, text


def poly(*coeffs, den=1):
    """Ascending coefficients divided by ``den``."""
    return tuple(Fraction(c, den) for c in coeffs)


def ev(coeffs, t):
    return sum(c * t ** k for k, c in enumerate(coeffs))


MAGIC_CUBICAL = {}
for rs, c in (((0, 2, 6, 8), poly(-96, 76, -16, 1, den=6)), ((1,), poly(-58, 73, -16, 1, den=6)),
              ((3, 11), poly(-102, 73, -16, 1, den=6)), ((4, 10), poly(-112, 76, -16, 1, den=6)),
              ((5, 9), poly(-90, 73, -16, 1, den=6)), ((7,), poly(-70, 73, -16, 1, den=6))):
    for r in rs:
        MAGIC_CUBICAL[r] = c

MAGIC_AFFINE = {r: poly(0, 0, 0) for r in range(18) if r % 3}
MAGIC_AFFINE.update({0: poly(144, -32, 2, den=9), 3: poly(78, -32, 2, den=9), 6: poly(120, -32, 2, den=9),
                     9: poly(126, -32, 2, den=9), 12: poly(96, -32, 2, den=9), 15: poly(102, -32, 2, den=9)})

RECTANGLE = {1: poly(-30, 41, -12, 1, den=4), 3: poly(-42, 41, -12, 1, den=4),
             0: poly(-48, 44, -12, 1, den=4), 2: poly(-48, 44, -12, 1, den=4)}


@lru_cache(maxsize=None)
def open_series(fam, params, mode, t_max):
    p = oracles.problem(fam, params, mode)
    return {t: C.count_open(p, t) for t in range(1, t_max + 1)}


@lru_cache(maxsize=None)
def open_fit(fam, params, mode, t_max):
    p = oracles.problem(fam, params, mode)
    return fit(open_series(fam, params, mode, t_max), p.dim, p.io_denominator, p.period)


def test_criterion_01_magic3_cubical():
    c = Criterion(1)
    series = open_series("magic", (3,), "cubical", 96)
    c.check("t=9 -> 0", series[9] == 0, series[9])
    c.check("t=10 -> 8", series[10] == 8, series[10])
    bad = [t for t, v in series.items() if ev(MAGIC_CUBICAL[t % 12], t) != v]
    c.check("t=1..96 match the six constituents", not bad, f"mismatch at {bad[:5]}")
    rep = open_fit("magic", (3,), "cubical", 96)
    c.check("fitted period 12", rep.period == 12, rep.period)
    q = rep.quasipolynomial
    c.check("fitted coefficients", all(q.constituent(r) == MAGIC_CUBICAL[r] for r in range(12)))
    c.finish()


def test_criterion_02_magic3_affine():
    c = Criterion(2)
    p = oracles.problem("magic", (3,), "affine")
    series = open_series("magic", (3,), "affine", 108)
    c.check("p(s) = 3", p.period == 3, p.period)
    c.check("t=15 -> 8", series[15] == 8, series[15])
    c.check("zero off multiples of 3", all(v == 0 for t, v in series.items() if t % 3))
    bad = [t for t, v in series.items() if ev(MAGIC_AFFINE[t % 18], t) != v]
    c.check("t=1..108 match the cases mod 18", not bad, f"mismatch at {bad[:5]}")
    q = open_fit("magic", (3,), "affine", 108).quasipolynomial
    c.check("fitted period divides 18", 18 % q.period == 0, q.period)
    c.check("fitted constituents mod 18", all(q.constituent(r) == MAGIC_AFFINE[r] for r in range(18)))
    c.finish()


def test_criterion_03_magic_permutations():
    c = Criterion(3)
    for mode, t_max in (("cubical", 96), ("affine", 108)):
        p = oracles.problem("magic", (3,), mode)
        q = open_fit("magic", (3,), mode, t_max).quasipolynomial
        sign = -1 if p.dim % 2 else 1
        c.check(f"{mode}: sign * q(0) = 16", sign * q(0) == 16, sign * q(0))
    got = {o.order for o in realizable_set(oracles.problem("magic", (3,)))}
    expected = set()
    for pat in ([4, 9, 2, 3, 5, 7, 8, 1, 6], [3, 9, 2, 4, 5, 6, 8, 1, 7]):
        for g in square_symmetries(3):
            moved = [0] * 9
            for cell in range(9):
                moved[g[cell]] = pat[cell]
            expected.add(sigma_from_positions(moved))
    c.check("16 realizable permutations", len(got) == 16, len(got))
    c.check("symmetries of patterns (a) and (b)", got == expected)
    c.finish()


@pytest.mark.slow
def test_criterion_04_semimagic():
    c = Criterion(4)
    semi = oracles.problem("semimagic", (3,))
    rep = conjecture_report(semi)
    c.check("1296 realizable", len(rep.realizable) == 1296, len(rep.realizable))
    c.check("semimagic(3) agreement", rep.agreement, rep.counterexamples[:3])
    rep = conjecture_report(oracles.problem("magic", (3,)))
    c.check("magic(3) agreement", rep.agreement, rep.counterexamples[:3])
    c.finish()


def test_criterion_05_magilatin_square():
    c = Criterion(5)
    p = oracles.problem("magilatin_square", (2,))
    rep = fit({t: C.count_open(p, t) for t in range(1, 13)}, p.dim, p.io_denominator)
    c.check("cubical fit (t-1)(t-2), period 1",
            rep.period == 1 and rep.quasipolynomial.constituents[0] == (2, -3, 1))
    closed = {t: C.count_closed_multiplicity(p, t) for t in range(0, 11)}
    c.check("closed series (t+1)(t+2)", all(v == (t + 1) * (t + 2) for t, v in closed.items()))
    c.check("reciprocity", all(rep.quasipolynomial(-t) == v for t, v in closed.items()))
    c.check("2 regions = closed constant term", len(p.regions) == 2 == closed[0])
    a = oracles.problem("magilatin_square", (2,), "affine")
    rep = fit({t: C.count_open(a, t) for t in range(1, 13)}, a.dim, a.io_denominator, a.period)
    q = rep.quasipolynomial
    c.check("affine period 2", rep.period == 2, rep.period)
    c.check("affine t-2 (even) / t-1 (odd)", q.constituents == ((-2, 1), (-1, 1)), q.constituents)
    c.finish()


def test_criterion_06_magilatin_rectangle():
    c = Criterion(6)
    p = oracles.problem("magilatin_rectangle", (2, 3))
    c.check("polytope denominator 6", p.vertex_set.denominator == 6, p.vertex_set.denominator)
    c.check("inside-out denominator 12", p.io_denominator == 12, p.io_denominator)
    series = open_series("magilatin_rectangle", (2, 3), "cubical", 60)
    bad = [t for t, v in series.items() if ev(RECTANGLE[t % 4], t) != v]
    c.check("t=1..60 match the three cases", not bad, f"mismatch at {bad[:5]}")
    rep = fit(series, p.dim, 12)
    c.check("fitted period 4", rep.period == 4, rep.period)
    c.check("fitted constituents", all(rep.quasipolynomial.constituent(r) == RECTANGLE[r] for r in range(4)))
    c.finish()


MOBIUS_CASES = [("magic", (3,), "cubical"), ("magic", (3,), "affine"), ("magilatin_square", (2,), "cubical"),
                ("magilatin_square", (2,), "affine"), ("magilatin_rectangle", (2, 3), "cubical")]


def test_criterion_07_moebius():
    c = Criterion(7)
    for fam, params, mode in MOBIUS_CASES:
        p = oracles.problem(fam, params, mode)
        bad = [t for t in range(1, 21) if C.moebius_count(p, t) != C.count_open(p, t)]
        c.check(f"{p.name} {mode}", not bad, f"mismatch at {bad[:5]}")
    c.finish()


def test_criterion_08_volume():
    c = Criterion(8)
    cub = oracles.problem("magic", (3,))
    aff = oracles.problem("magic", (3,), "affine")
    c.check("cubical volume 1/6", normalized_volume(cub.polytope) == Fraction(1, 6))
    c.check("affine volume 2/9 at scale 3", normalized_volume(aff.polytope, 3) == Fraction(2, 9))
    q = open_fit("magic", (3,), "cubical", 96).quasipolynomial
    c.check("cubical leading coefficients", set(q.leading_coefficients) == {Fraction(1, 6)})
    q = open_fit("magic", (3,), "affine", 108).quasipolynomial
    lead = {q.constituent(r)[2] for r in range(0, 18, 3)}
    c.check("affine leading coefficients on residues 0 mod 3", lead == {Fraction(2, 9)}, lead)
    c.finish()


def _regime_counts(p, t, pats):
    out = {C.WEAK_CLOSED: (C.count_weak(p, t, open=False), oracles.naive_weak_closed(p, t)),
           C.CLOSED_MULT: (C.count_closed_multiplicity(p, t), oracles.naive_closed_multiplicity(p, t, pats))}
    if t:
        out[C.OPEN_STRONG] = (C.count_open(p, t), oracles.naive_open(p, t))
        out[C.WEAK_OPEN] = (C.count_weak(p, t), oracles.naive_open(p, t, strong=False))
    try:
        if t:
            out[C.MOEBIUS_OPEN] = (C.moebius_count(p, t), out[C.OPEN_STRONG][1])
        out[C.MOEBIUS_CLOSED] = (C.moebius_count(p, t, open=False), out[C.CLOSED_MULT][1])
    except (NotConstantWeight, NotTransverse):
        pass
    return out


def test_criterion_09_oracle_equivalence():
    c = Criterion(9)
    for p in oracles.small_builtins():
        pats = oracles.region_patterns(p, 12)
        bad = []
        for t in range(0, 13):
            for regime, (got, want) in _regime_counts(p, t, pats).items():
                if got != want:
                    bad.append(f"{regime} t={t}: {got} vs {want}")
        c.check(f"{p.name} {p.mode} {p.distinctness}", not bad, "; ".join(bad[:3]))
    c.finish()


def test_criterion_10_properties():
    c = Criterion(10)
    probs = [oracles.problem(f, a, m) for f, a, m in MOBIUS_CASES] + list(oracles.small_builtins())
    c.check("Moebius identity on all posets", all(moebius_identity_holds(p.poset) for p in probs))
    for p in probs[:len(MOBIUS_CASES)]:
        forms, classes = _conjecture_forms(p)
        reals = [o.positions() for o in realizable_set(p)]
        if reals:
            ok = antichain_mask(np.array(reals, dtype=np.int8), forms, classes).all()
            c.check(f"antichain necessity {p.name} {p.mode}", ok)
    for p in probs:
        if p.mode == "affine" and p.period > 1:
            bad = [t for t in range(1, 13) if t % p.period and C.count_open(p, t)]
            c.check(f"affine vanishing {p.name}", not bad, f"nonzero at {bad[:5]}")
    for fam, params, mode in MOBIUS_CASES:
        p = oracles.problem(fam, params, mode)
        rep = open_fit(fam, params, mode, 2 * p.io_denominator * (p.dim + 1))
        c.check(f"period divides denominator {p.name} {mode}", p.io_denominator % rep.period == 0)
    cmd = [sys.executable, "-m", "insideout", "verify", "--builtin", "magilatin_square:2"]
    runs = [subprocess.run(cmd, capture_output=True).stdout for _ in range(2)]
    c.check("byte-identical reports", runs[0] == runs[1] and json.loads(runs[0])["verify"]["passed"])
    c.finish()
