"""Infinitesimal invariance under natural lifts.

The generator system on J^1(M x C) is written out family by family
(X^i, X^i_h, X^ik_h, X^jkh_i).  Every term below mirrors one displayed
term; sums run over all index values and y-indices are canonicalized by
:class:`VarId`.  On charts without such a list, invariance is tested with
the lifts of the monomial fields x^I d/dx^h, which span every jet of a
base field at any point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement

from .charts import ChartSpec, metric_point_ok
from .lifts import (
    BaseVectorField,
    VectorField,
    lift_connection,
    lift_metric,
    lift_product,
    monomial_fields,
    prolong,
)
from .linalg import Span, in_span, rank
from .symexpr import CheckOptions, RationalExpr, VarId, Verdict, get_ring, random_point, substitute


@dataclass
class GeneratorSet:
    chart: ChartSpec
    generators: list[VectorField]

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def by_label(self, label: str) -> VectorField:
        for g in self.generators:
            if g.label == label:
                return g
        raise KeyError(label)

    @property
    def labels(self) -> list[str]:
        return [g.label for g in self.generators]


class _Builder:
    """Accumulates d/dv components on the full J^1(M x C) chart."""

    def __init__(self, n):
        self.R = get_ring(n)
        self.comps: dict[VarId, RationalExpr] = {}

    def add(self, v: VarId, c) -> None:
        c = self.R.coerce(c)
        self.comps[v] = self.comps.get(v, self.R.zero) + c


def _X_i(n, i):
    b = _Builder(n)
    b.add(VarId.x(i), 1)
    return b.comps


def _X_hi(n, h, i):
    b = _Builder(n)
    R = b.R
    r = range(1, n + 1)
    b.add(VarId.y(i, i), -R.y(h, i))
    for j in r:
        b.add(VarId.y(i, j), -R.y(h, j))
    for k in r:
        b.add(VarId.y1(i, i, k), -R.y1(i, h, k))
    for j in r:
        for k in r:
            b.add(VarId.y1(i, j, k), -R.y1(h, j, k))
    for s in r:
        for j in range(s, n + 1):
            b.add(VarId.y1(s, j, i), -R.y1(s, j, h))
    for j in r:
        for k in r:
            b.add(VarId.A(h, j, k), R.A(i, j, k))
    for j in r:
        for rr in r:
            b.add(VarId.A(rr, j, i), -R.A(rr, j, h))
    for k in r:
        for rr in r:
            b.add(VarId.A(rr, i, k), -R.A(rr, h, k))
    for j in r:
        for k in r:
            for s in r:
                b.add(VarId.A1(h, j, k, s), R.A1(i, j, k, s))
    for j in r:
        for rr in r:
            for s in r:
                b.add(VarId.A1(s, j, i, rr), -R.A1(s, j, h, rr))
    for k in r:
        for rr in r:
            for s in r:
                b.add(VarId.A1(s, i, k, rr), -R.A1(s, h, k, rr))
    for j in r:
        for k in r:
            for rr in r:
                b.add(VarId.A1(rr, j, k, i), -R.A1(rr, j, k, h))
    return b.comps


def _X_ikh(n, h, i, k):
    b = _Builder(n)
    R = b.R
    r = range(1, n + 1)
    b.add(VarId.y1(i, i, k), -R.y(i, h))
    b.add(VarId.y1(k, k, i), -R.y(k, h))
    for j in r:
        b.add(VarId.y1(i, j, k), -R.y(h, j))
        b.add(VarId.y1(k, j, i), -R.y(h, j))
    b.add(VarId.A(h, i, k), -1)
    b.add(VarId.A(h, k, i), -1)
    for j in r:
        for s in r:
            b.add(VarId.A1(h, j, s, i), R.A(k, j, s))
            b.add(VarId.A1(s, j, k, i), -R.A(s, j, h))
            b.add(VarId.A1(s, k, j, i), -R.A(s, h, j))  # j plays the role of r
            b.add(VarId.A1(h, j, s, k), R.A(i, j, s))
            b.add(VarId.A1(s, j, i, k), -R.A(s, j, h))
            b.add(VarId.A1(s, i, j, k), -R.A(s, h, j))
    return b.comps


def _X_jkh_i(n, i, h, j, k):
    b = _Builder(n)
    b.add(VarId.A1(i, j, k, h), 1)
    b.add(VarId.A1(i, j, h, k), 1)
    b.add(VarId.A1(i, h, k, j), 1)
    b.add(VarId.A1(i, h, j, k), 1)
    b.add(VarId.A1(i, k, j, h), 1)
    b.add(VarId.A1(i, k, h, j), 1)
    return b.comps


def _to_sym(comps: dict[VarId, RationalExpr], n: int) -> dict[VarId, RationalExpr]:
    """Restrict a field tangent to the symmetric sub-bundle to C^sym
    coordinates: keep the components along canonical A^i_jk (j <= k) and
    rewrite coefficients in symmetric variables."""
    R = get_ring(n)
    ren = {}
    for v in R.vars:
        if v.kind == "A" and v.idx[1] > v.idx[2]:
            ren[v] = R.var(VarId.A(*v.idx, sym=True))
        elif v.kind == "A1" and v.idx[1] > v.idx[2]:
            ren[v] = R.var(VarId.A1(*v.idx, sym=True))
    out = {}
    for v, c in comps.items():
        if v.kind in ("A", "A1") and v.idx[1] > v.idx[2]:
            continue
        out[v] = substitute(c, ren) if any(w in ren for w in c.variables()) else c
    return out


@lru_cache(maxsize=None)
def generators(n: int, variant: str = "full") -> GeneratorSet:
    """The generator system, labelled by their index pattern."""
    if n not in (2, 3, 4):
        raise ValueError(f"unsupported n={n}")
    if variant not in ("full", "sym"):
        raise ValueError(f"unknown variant {variant!r}")
    chart = ChartSpec(n, "J1MxC" if variant == "full" else "J1MxCsym")
    r = range(1, n + 1)
    raw = []
    for i in r:
        raw.append((f"X^{i}", _X_i(n, i)))
    for h in r:
        for i in r:
            raw.append((f"X^{i}_{h}", _X_hi(n, h, i)))
    for h in r:
        for i in r:
            for k in range(i, n + 1):
                raw.append((f"X^{i}{k}_{h}", _X_ikh(n, h, i, k)))
    for i in r:
        for h, j, k in combinations_with_replacement(r, 3):
            raw.append((f"X^{h}{j}{k}_{i}", _X_jkh_i(n, i, h, j, k)))
    gens = []
    for label, comps in raw:
        if variant == "sym":
            comps = _to_sym(comps, n)
        gens.append(VectorField(chart, comps, label))
    return GeneratorSet(chart, gens)


def expected_generator_count(n: int) -> int:
    return n * (n + 1) * (n + 2) * (n + 3) // 6


def invariant_count(n: int) -> int:
    return (5 * n**4 + 3 * n**3 - 5 * n**2 + 3 * n) // 6


# ---------------------------------------------------------------------------
# Invariance tests


@dataclass
class InvarianceResult:
    invariant: bool
    method: str
    checks: list[tuple[str, Verdict]] = field(default_factory=list)
    residuals: dict[str, RationalExpr] = field(default_factory=dict)

    @property
    def failures(self) -> list[str]:
        return [label for label, v in self.checks if not v.zero]

    def to_json(self) -> dict:
        from .symexpr import to_prefix

        return {
            "invariant": self.invariant,
            "method": self.method,
            "checked": len(self.checks),
            "failures": [
                {"field": label, "residual": to_prefix(self.residuals[label]), **v.to_json()}
                for label, v in self.checks
                if not v.zero
            ],
        }


_GENERATOR_CHARTS = {"J1MxC": "full", "J1MxCsym": "sym"}


def _monomial_lift(u: BaseVectorField, chart: ChartSpec) -> VectorField:
    space = chart.space
    if space in ("J1MxC", "J1MxCsym"):
        return lift_product(u, symmetric=chart.symmetric, signature=chart.signature)
    base = chart.base_space()
    if base == "M":
        X = lift_metric(u, signature=chart.signature)
    elif base in ("C", "Csym"):
        X = lift_connection(u, symmetric=base == "Csym")
    else:
        raise ValueError(f"no lift implemented for chart {space}")
    return prolong(X, chart.order) if chart.order else X


def lift_degree_bound(chart: ChartSpec) -> int:
    """Highest order of u-derivative entering the lift on ``chart``."""
    return chart.order + (2 if chart.has_connection else 1)


def _check_chart(L: RationalExpr, chart: ChartSpec) -> None:
    coords = set(chart.coordinates())
    extra = sorted(v for v in L.variables() if v not in coords)
    if extra:
        names = ", ".join(v.name for v in extra[:5])
        raise ValueError(f"expression uses coordinates outside chart {chart.space}: {names}")


def is_invariant(
    L: RationalExpr,
    chart: ChartSpec,
    opts: CheckOptions | None = None,
    method: str = "auto",
    stop_at_first: bool = False,
) -> InvarianceResult:
    """Apply every generator (or every monomial lift) to L and test the
    results for identical vanishing."""
    opts = opts or CheckOptions()
    _check_chart(L, chart)
    if method == "auto":
        method = "generators" if chart.space in _GENERATOR_CHARTS else "monomials"
    if method == "generators":
        if chart.space not in _GENERATOR_CHARTS:
            raise ValueError(f"no generator family implemented on chart {chart.space}")
        fields = list(generators(chart.n, _GENERATOR_CHARTS[chart.space]))
    elif method == "monomials":
        try:
            fields = []
            for u in monomial_fields(chart.n, lift_degree_bound(chart)):
                X = _monomial_lift(u, chart)
                X.label = "lift(" + _describe(u) + ")"
                fields.append(X)
        except ValueError as exc:
            raise ValueError(f"no generator family implemented on chart {chart.space}") from exc
    else:
        raise ValueError(f"unknown method {method!r}")
    res = InvarianceResult(True, method)
    for X in fields:
        r = X.apply(L)
        v = opts.check(r, f"inv:{X.label}")
        res.checks.append((X.label, v))
        if not v.zero:
            res.invariant = False
            res.residuals[X.label] = r
            if stop_at_first:
                break
    return res


def _describe(u: BaseVectorField) -> str:
    for h, c in enumerate(u.u, start=1):
        if not c.is_zero():
            return f"{c} d/dx{h}"
    return "0"


def degree_bound_check(chart: ChartSpec, extra_degree: int = 1) -> tuple[bool, list[str]]:
    """Lifts of monomials of degree bound+extra vanish at x = 0, so they add
    no condition beyond those of lower degree.  Returns (ok, offending)."""
    d = lift_degree_bound(chart) + extra_degree
    R = get_ring(chart.n)
    at0 = {VarId.x(i): R.zero for i in range(1, chart.n + 1)}
    bad = []
    for u in monomial_fields(chart.n, d):
        c = next(c for c in u.u if not c.is_zero())
        if sum(c.num.degrees()) != d:
            continue
        X = _monomial_lift(u, chart)
        for v, c in X.components.items():
            if not substitute(c, at0).is_zero():
                bad.append(f"{_describe(u)}: {v.name}")
                break
    return not bad, bad


# ---------------------------------------------------------------------------
# Rank and involutivity


def random_generic_point(chart: ChartSpec, rng, coeff_bound: int = 1000, signature=None) -> dict[VarId, Fraction]:
    """Random rational point of the chart with a nondegenerate metric of the
    chart's signature, or of ``signature`` when given."""
    signature = tuple(signature) if signature is not None else chart.signature
    for _ in range(1000):
        pt = random_point(chart.coordinates(), rng, coeff_bound)
        if not chart.has_metric or metric_point_ok(pt, chart.n, signature):
            return pt
    raise ArithmeticError("could not sample a metric of the requested signature")


def generator_matrix(gs: GeneratorSet, point) -> list[list[Fraction]]:
    return [g.values_at(point) for g in gs]


def generator_spans(gs: GeneratorSet, points) -> list[Span]:
    return [Span(generator_matrix(gs, p)) for p in points]


def distribution_rank(gs: GeneratorSet, point) -> int:
    return rank(generator_matrix(gs, point))


def generic_rank(gs: GeneratorSet, rng, coeff_bound: int = 1000, attempts: int = 5) -> int:
    """Rank at a random point, resampling if it drops below the count."""
    best = 0
    for _ in range(attempts):
        best = max(best, distribution_rank(gs, random_generic_point(gs.chart, rng, coeff_bound)))
        if best == len(gs):
            break
    return best


def bracket_in_span(gs: GeneratorSet, X: VectorField, Y: VectorField, point) -> bool:
    """[X, Y] at ``point`` lies in the span of the generator values there."""
    return in_span(generator_matrix(gs, point), X.bracket(Y).values_at(point))
