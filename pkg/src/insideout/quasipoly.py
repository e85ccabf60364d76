"""Quasipolynomial fitting with minimal-period detection, evaluation, and structural checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .counting import CountSeries, count_closed_multiplicity
from .errors import InsufficientData, NoConsistentPeriod
from .exact import fmt_rational


@dataclass(frozen=True)
class Quasipolynomial:
    """``constituents[r]`` holds ascending coefficients for ``t ≡ r (mod period)``."""

    period: int
    degree: int
    constituents: tuple

    def __call__(self, t: int) -> Fraction:
        return evaluate(self, t)

    def constituent(self, t: int) -> tuple:
        return self.constituents[t % self.period]

    @property
    def leading_coefficients(self) -> tuple:
        return tuple(c[self.degree] for c in self.constituents)

    @property
    def constant_terms(self) -> tuple:
        return tuple(c[0] for c in self.constituents)

    def distinct_constituents(self) -> dict:
        """Map each distinct coefficient vector to the residues using it."""
        out: dict = {}
        for r, c in enumerate(self.constituents):
            out.setdefault(c, []).append(r)
        return out

    def to_json(self) -> dict:
        return {
            "period": self.period,
            "degree": self.degree,
            "constituents": [[fmt_rational(a) for a in c] for c in self.constituents],
        }


def evaluate(q: Quasipolynomial, t: int) -> Fraction:
    """Exact value at any integer ``t`` (negative allowed)."""
    coeffs = q.constituents[t % q.period]
    acc = Fraction(0)
    for a in reversed(coeffs):
        acc = acc * t + a
    return acc


def interpolate(points: Sequence[tuple]) -> tuple:
    """Ascending coefficients of the unique polynomial through ``points`` (exact Lagrange)."""
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(points):
        if yi == 0:
            continue
        # basis polynomial prod_{j != i} (t - xj) / (xi - xj)
        basis = [Fraction(1)]
        denom = 1
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        scale = Fraction(yi) / denom
        for k in range(n):
            coeffs[k] += scale * basis[k]
    return tuple(coeffs)


def sign_pattern(coeffs) -> str:
    """Signs of the coefficients from the top degree down, e.g. ``+-+-``."""
    return "".join("+" if a > 0 else "-" if a < 0 else "0" for a in reversed(coeffs))


def _divisors(n: int) -> list:
    return [k for k in range(1, n + 1) if n % k == 0]


@dataclass
class FitReport:
    quasipolynomial: Quasipolynomial
    candidates_tried: list
    fit_points: dict  # residue -> t values used for interpolation
    held_out: list
    regime: Optional[str] = None

    @property
    def period(self) -> int:
        return self.quasipolynomial.period

    @property
    def leading_coefficients(self):
        return self.quasipolynomial.leading_coefficients

    @property
    def constant_terms(self):
        return self.quasipolynomial.constant_terms

    def to_json(self) -> dict:
        q = self.quasipolynomial
        return {
            "regime": self.regime,
            "period": q.period,
            "degree": q.degree,
            "candidates_tried": list(self.candidates_tried),
            "held_out": len(self.held_out),
            "constituents": [[fmt_rational(a) for a in c] for c in q.constituents],
            "leading_coefficients": [fmt_rational(a) for a in q.leading_coefficients],
            "constant_terms": [fmt_rational(a) for a in q.constant_terms],
            "sign_patterns": [sign_pattern(c) for c in q.constituents],
        }


def _try_period(data: Mapping[int, int], D: int, c: int):
    consts = []
    used = {}
    for r in range(c):
        ts = sorted(t for t in data if t % c == r)
        pts = [(t, data[t]) for t in ts[: D + 1]]
        coeffs = interpolate(pts)
        for t in ts[D + 1:]:
            acc = Fraction(0)
            for a in reversed(coeffs):
                acc = acc * t + a
            if acc != data[t]:
                return None
        consts.append(coeffs)
        used[r] = [t for t, _ in pts]
    return tuple(consts), used


def fit(series, degree: int, period_bound: int, period_multiple: int = 1, regime: Optional[str] = None) -> FitReport:
    """Fit the quasipolynomial of least period consistent with ``series``.

    ``series`` is a mapping ``t -> count`` (or a CountSeries).  Candidate
    periods are the divisors of ``period_bound`` that are multiples of
    ``period_multiple``, tried in increasing order.  A candidate is only
    judged when each residue class carries at least ``2 (degree + 1)``
    values, so every constituent is checked on as many points as it was
    fitted on.

    Raises:
        InsufficientData: a candidate could not be judged for lack of data
            before any consistent candidate was found.
        NoConsistentPeriod: every candidate was refuted.
    """
    data = dict(series.values) if isinstance(series, CountSeries) else dict(series)
    if degree < 0 or period_bound < 1 or period_multiple < 1:
        raise ValueError("degree must be >= 0 and period bounds positive")
    if regime is None:
        regime = getattr(series, "regime", None)
    need = 2 * (degree + 1)
    tried = []
    for c in _divisors(period_bound):
        if c % period_multiple:
            continue
        sizes = [sum(1 for t in data if t % c == r) for r in range(c)]
        if min(sizes) < need:
            raise InsufficientData(
                f"period candidate {c} needs {need} values per residue class; smallest class has {min(sizes)}"
            )
        tried.append(c)
        res = _try_period(data, degree, c)
        if res is None:
            continue
        consts, used = res
        q = Quasipolynomial(c, degree, consts)
        fitted = {t for ts in used.values() for t in ts}
        held = sorted(t for t in data if t not in fitted)
        return FitReport(q, tried, used, held, regime)
    raise NoConsistentPeriod(
        f"no period among {tried} fits the data with degree {degree}; bound {period_bound} or degree is wrong"
    )


@dataclass
class Check:
    name: str
    passed: Optional[bool]  # None = skipped
    expected: object = None
    actual: object = None
    detail: str = ""

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, Fraction):
                return fmt_rational(v)
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            if isinstance(v, dict):
                return {str(k): enc(x) for k, x in v.items()}
            return v

        status = "skip" if self.passed is None else ("pass" if self.passed else "fail")
        out = {"check": self.name, "status": status}
        if self.expected is not None:
            out["expected"] = enc(self.expected)
        if self.actual is not None:
            out["actual"] = enc(self.actual)
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class StructureReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def add(self, *a, **kw) -> Check:
        c = Check(*a, **kw)
        self.checks.append(c)
        return c

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def verify_structure(report: FitReport, problem, closed_series: Optional[Mapping[int, int]] = None,
                     t_recip: int = 10) -> StructureReport:
    """Leading term vs volume, constant term vs regions, and reciprocity.

    ``report`` must be a fit of the open strong count.  ``closed_series``
    (closed counts with multiplicity) is computed for ``t = 0..t_recip`` when
    not supplied.
    """
    q = report.quasipolynomial
    out = StructureReport()
    p = problem.period
    vol = problem.volume
    lead = {r: c[q.degree] for r, c in enumerate(q.constituents) if q.period and r % p == 0}
    out.add("leading-coefficient", all(v == vol for v in lead.values()), vol, sorted(set(lead.values())),
            f"residues ≡ 0 mod {p}")
    if p > 1:
        zero_ok = all(not any(c) for r, c in enumerate(q.constituents) if r % p)
        out.add("vanishing-off-period", zero_ok, detail=f"constituents on residues ≢ 0 mod {p} are zero")
    sign = -1 if problem.dim % 2 else 1
    regions = len(problem.regions)
    out.add("constant-term", sign * evaluate(q, 0) == regions, regions, sign * evaluate(q, 0))
    if closed_series is None:
        closed_series = {t: count_closed_multiplicity(problem, t) for t in range(t_recip + 1)}
    bad = {t: (sign * evaluate(q, -t), v) for t, v in sorted(closed_series.items()) if sign * evaluate(q, -t) != v}
    out.add("reciprocity", not bad, detail="" if not bad else
            "; ".join(f"t={t}: q gives {fmt_rational(a)}, count {b}" for t, (a, b) in bad.items()))
    return out
