"""First-order Ehresmann connections on M x C and M x C^sym.

A connection is stored as two coefficient tables:

* ``gamma_M[(k, l, j)]`` with k <= l: the metric part gamma_klj,
* ``gamma_C[(h, s, t, r)]``: the connection part gamma^h_str, where r is
  the differential index.  On C^sym only s <= t is stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement, permutations

from .charts import ChartSpec
from .invariance import GeneratorSet, generator_spans, generators
from .lifts import VectorField
from .linalg import InconsistentSystemError, solve_symbolic
from .symexpr import CheckOptions, RationalExpr, VarId, Verdict, get_ring, to_prefix

Key3 = tuple[int, int, int]
Key4 = tuple[int, int, int, int]


@dataclass(frozen=True)
class EhresmannConn1:
    chart: ChartSpec
    gamma_M: dict
    gamma_C: dict

    def __post_init__(self):
        if self.chart.space not in ("MxC", "MxCsym"):
            raise ValueError("first-order connections live on MxC or MxCsym")

    @property
    def n(self) -> int:
        return self.chart.n

    @property
    def symmetric(self) -> bool:
        return self.chart.symmetric

    @property
    def jet_chart(self) -> ChartSpec:
        return self.chart.with_space(self.chart.jet_space(1))

    def gM(self, k: int, l: int, j: int) -> RationalExpr:
        return self.gamma_M[(min(k, l), max(k, l), j)]

    def gC(self, h: int, s: int, t: int, r: int) -> RationalExpr:
        if self.symmetric and s > t:
            s, t = t, s
        return self.gamma_C[(h, s, t, r)]

    def D(self) -> VectorField:
        """D^gamma as a vertical field on the first jet chart."""
        R = get_ring(self.n)
        comps = {}
        for (k, l, j), g in self.gamma_M.items():
            v = VarId.y1(k, l, j)
            comps[v] = g + R.var(v)
        for (h, s, t, r), g in self.gamma_C.items():
            v = VarId.A1(h, s, t, r, self.symmetric)
            comps[v] = g + R.var(v)
        return VectorField(self.jet_chart, comps, "D^gamma")

    def with_gamma_C(self, table: dict) -> "EhresmannConn1":
        return EhresmannConn1(self.chart, dict(self.gamma_M), dict(table))

    def with_gamma_M(self, table: dict) -> "EhresmannConn1":
        return EhresmannConn1(self.chart, dict(table), dict(self.gamma_C))

    def to_json(self) -> dict:
        out = {"chart": self.chart.space, "n": self.n}
        out["gamma_M"] = {f"g_{k}{l}{j}": to_prefix(e) for (k, l, j), e in sorted(self.gamma_M.items())}
        out["gamma_C"] = {f"G^{h}_{s}{t}{r}": to_prefix(e) for (h, s, t, r), e in sorted(self.gamma_C.items())}
        return out


def _A(n, sym):
    R = get_ring(n)
    return lambda i, j, k: R.A(i, j, k, sym)


def gamma_M_cm(n: int, symmetric: bool = False) -> dict:
    """gamma_klj = -(y_al A^a_jk + y_ak A^a_jl), k <= l."""
    R = get_ring(n)
    A = _A(n, symmetric)
    rng = range(1, n + 1)
    out = {}
    for k in rng:
        for l in range(k, n + 1):
            for j in rng:
                e = R.zero
                for a in rng:
                    e = e + R.y(a, l) * A(a, j, k) + R.y(a, k) * A(a, j, l)
                out[(k, l, j)] = -e
    return out


def rhs_curvature(n, sym, h, s, t, r) -> RationalExpr:
    """Right side of gamma^h_str - gamma^h_rts."""
    A = _A(n, sym)
    e = get_ring(n).zero
    for m in range(1, n + 1):
        e = e + A(h, r, m) * A(m, s, t) - A(h, s, m) * A(m, r, t)
    return e


def rhs_torsion(n, sym, h, r, s, t) -> RationalExpr:
    """Right side of gamma^h_rst - gamma^h_srt."""
    A = _A(n, sym)
    e = get_ring(n).zero
    for m in range(1, n + 1):
        e = (
            e
            + A(h, t, m) * (A(m, r, s) - A(m, s, r))
            + A(m, t, s) * (A(h, m, r) - A(h, r, m))
            + A(m, t, r) * (A(h, s, m) - A(h, m, s))
        )
    return e


def _solve_orbit(n, sym, h, multiset, pin="sum"):
    """Solve the curvature and torsion equations of (C_C) on one S_3-orbit of lower indices.  The free totally
    symmetric direction is fixed by ``pin``: "sum" makes the orbit sum zero,
    "first" makes the lexicographically first component zero."""
    perms = sorted(set(permutations(multiset)))
    col = {p: i for i, p in enumerate(perms)}
    rows, rhs = [], []
    R = get_ring(n)

    def eq(plus, minus, b):
        row = [0] * len(perms)
        row[col[plus]] += 1
        row[col[minus]] -= 1
        rows.append(row)
        rhs.append(b)

    for s, t, r in perms:
        eq((s, t, r), (r, t, s), rhs_curvature(n, sym, h, s, t, r))
    for r, s, t in perms:
        eq((r, s, t), (s, r, t), rhs_torsion(n, sym, h, r, s, t))
    if pin == "sum":
        rows.append([1] * len(perms))
    elif pin == "first":
        rows.append([1] + [0] * (len(perms) - 1))
    else:
        raise ValueError(f"unknown pin {pin!r}")
    rhs.append(R.zero)
    try:
        sol = solve_symbolic(rows, rhs)
    except InconsistentSystemError as exc:
        raise InconsistentSystemError(
            f"(C_C) constraints inconsistent for h={h}, indices {multiset}", exc.residuals
        ) from None
    return dict(zip(perms, sol))


@lru_cache(maxsize=None)
def gamma_C_particular(n: int, variant: str = "full") -> dict:
    """A solution of (C_C) with zero totally symmetric part."""
    return gamma_C_solution(n, variant, "sum")


@lru_cache(maxsize=None)
def gamma_C_solution(n: int, variant: str = "full", pin: str = "sum") -> dict:
    if variant not in ("full", "sym"):
        raise ValueError(f"unknown variant {variant!r}")
    sym = variant == "sym"
    out = {}
    rng = range(1, n + 1)
    for h in rng:
        for ms in combinations_with_replacement(rng, 3):
            for (s, t, r), e in _solve_orbit(n, sym, h, ms, pin).items():
                if sym and s > t:
                    if out.get((h, t, s, r), e) != e:
                        raise InconsistentSystemError("symmetric solution is not symmetric", [])
                    continue
                out[(h, s, t, r)] = e
    return out


@lru_cache(maxsize=None)
def canonical_connection(n: int, variant: str = "full") -> EhresmannConn1:
    sym = variant == "sym"
    chart = ChartSpec(n, "MxCsym" if sym else "MxC")
    return EhresmannConn1(chart, gamma_M_cm(n, sym), gamma_C_particular(n, variant))


# ---------------------------------------------------------------------------
# Symmetric differences (the affine freedom)


def random_symmetric_difference(n: int, rng, variant: str = "full", terms: int = 2, coeff_range: int = 9) -> dict:
    """t^h_abc totally symmetric in (a, b, c), affine in A with small integer
    coefficients.  Keys are (h, a, b, c) with a <= b <= c."""
    R = get_ring(n)
    sym = variant == "sym"
    avars = [v for v in ChartSpec(n, "Csym" if sym else "C").coordinates() if v.kind == "A"]
    out = {}
    for h in range(1, n + 1):
        for ms in combinations_with_replacement(range(1, n + 1), 3):
            e = R.const(rng.randint(-coeff_range, coeff_range))
            for _ in range(terms):
                e = e + rng.randint(-coeff_range, coeff_range) * R.var(rng.choice(avars))
            out[(h,) + ms] = e
    return out


def add_symmetric_difference(c: EhresmannConn1, t: dict) -> EhresmannConn1:
    table = {}
    for (h, s, tt, r), e in c.gamma_C.items():
        table[(h, s, tt, r)] = e + t[(h,) + tuple(sorted((s, tt, r)))]
    return c.with_gamma_C(table)


def symmetric_part_check(diff: dict, n: int, symmetric: bool, opts: CheckOptions | None = None) -> list:
    """Names of index triples where a gamma_C difference fails total symmetry."""
    opts = opts or CheckOptions()
    R = get_ring(n)
    bad = []

    def get(h, s, t, r):
        if symmetric and s > t:
            s, t = t, s
        return diff.get((h, s, t, r), R.zero)

    for (h, s, t, r) in diff:
        for p in set(permutations((s, t, r))):
            v = opts.check(get(h, *p) - get(h, s, t, r), f"sym:{h}{s}{t}{r}{p}")
            if not v.zero:
                bad.append((f"G^{h}_{s}{t}{r} vs G^{h}_{''.join(map(str, p))}", v))
                break
    return bad


def difference(c1: EhresmannConn1, c2: EhresmannConn1) -> dict:
    return {k: c1.gamma_C[k] - c2.gamma_C[k] for k in c1.gamma_C}


# ---------------------------------------------------------------------------
# Conditions


@dataclass
class ConditionRecord:
    name: str
    verdict: Verdict
    residual: RationalExpr

    def to_json(self) -> dict:
        d = {"name": self.name, **self.verdict.to_json()}
        if not self.verdict.zero:
            d["residual"] = to_prefix(self.residual)
        return d


@dataclass
class ConditionReport:
    records: list[ConditionRecord] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.verdict.zero for r in self.records)

    @property
    def failures(self) -> list[ConditionRecord]:
        return [r for r in self.records if not r.verdict.zero]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checked": len(self.records), "failures": [r.to_json() for r in self.failures]}


def check_conditions(c: EhresmannConn1, opts: CheckOptions | None = None) -> ConditionReport:
    opts = opts or CheckOptions()
    n, sym = c.n, c.symmetric
    rep = ConditionReport()

    def record(name, e):
        rep.records.append(ConditionRecord(name, opts.check(e, name), e))

    cm = gamma_M_cm(n, sym)
    for key, e in sorted(cm.items()):
        k, l, j = key
        record(f"(C_M) g_{k}{l}{j}", c.gamma_M[key] - e)
    for key, e in sorted(c.gamma_C.items()):
        bad = sorted(v for v in e.variables() if v.kind != "A" and v.kind != "x")
        if bad:
            h, s, t, r = key
            rep.records.append(
                ConditionRecord(
                    f"(C_C) G^{h}_{s}{t}{r} defined on C",
                    Verdict(False, opts.mode, witness=None),
                    e,
                )
            )
    rng = range(1, n + 1)
    for h in rng:
        for s in rng:
            for t in rng:
                for r in rng:
                    res = c.gC(h, s, t, r) - c.gC(h, r, t, s) - rhs_curvature(n, sym, h, s, t, r)
                    record(f"(C_C) curvature h={h} str={s}{t}{r}", res)
                    if not sym:
                        res = c.gC(h, s, t, r) - c.gC(h, t, s, r) - rhs_torsion(n, sym, h, s, t, r)
                        record(f"(C_C) torsion h={h} rst={s}{t}{r}", res)
    return rep


def sym_curvature_residuals(c: EhresmannConn1, opts: CheckOptions | None = None) -> list:
    """gamma^h_rts - gamma^h_rst - (A^h_sm A^m_rt - A^h_tm A^m_rs) on C^sym."""
    opts = opts or CheckOptions()
    n = c.n
    A = _A(n, True)
    R = get_ring(n)
    out = []
    rng = range(1, n + 1)
    for h in rng:
        for r in rng:
            for s in rng:
                for t in rng:
                    rhs = R.zero
                    for m in rng:
                        rhs = rhs + A(h, s, m) * A(m, r, t) - A(h, t, m) * A(m, r, s)
                    e = c.gC(h, r, t, s) - c.gC(h, r, s, t) - rhs
                    name = f"C^sym curvature h={h} rst={r}{s}{t}"
                    out.append(ConditionRecord(name, opts.check(e, name), e))
    return out


# ---------------------------------------------------------------------------
# Covariant Hamiltonian and brackets


def _check_on(L: RationalExpr, chart: ChartSpec) -> None:
    coords = set(chart.coordinates())
    extra = sorted(v for v in L.variables() if v not in coords)
    if extra:
        raise ValueError(f"expression is not over chart {chart.space}: uses {extra[0].name}")


def covariant_hamiltonian1(L: RationalExpr, c: EhresmannConn1) -> RationalExpr:
    """L^gamma = D^gamma(L) - L."""
    _check_on(L, c.jet_chart)
    return c.D().apply(L) - L


def bracket_membership(
    g: VectorField,
    c: EhresmannConn1,
    points: list,
    gs: GeneratorSet | None = None,
    spans: list | None = None,
) -> tuple[bool, list[bool]]:
    """Is [g, D^gamma] in the pointwise span of the generators?

    ``spans`` may carry precomputed ``generator_spans(gs, points)`` when many
    generators are tested at the same points.
    """
    if gs is None:
        gs = generators(c.n, "sym" if c.symmetric else "full")
    if g.chart != c.jet_chart:
        raise ValueError("generator and connection live on different charts")
    if spans is None:
        spans = generator_spans(gs, points)
    br = g.bracket(c.D())
    flags = [sp.contains(br.values_at(pt)) for sp, pt in zip(spans, points)]
    return all(flags), flags


# ---------------------------------------------------------------------------
# Compatibility of the (C_C) equations on the full bundle


def hexagon_residual(n: int, h: int, abc: Key3, sym: bool = False) -> RationalExpr:
    """Sum of the curvature and torsion right sides around the closed S_3 cycle
    through ``abc``.  The left sides telescope, so a solution exists on that
    orbit only if this vanishes."""
    p = abc
    tot = get_ring(n).zero
    for step in range(6):
        if step % 2 == 0:
            tot = tot + rhs_curvature(n, sym, h, *p)
            p = (p[2], p[1], p[0])
        else:
            tot = tot + rhs_torsion(n, sym, h, *p)
            p = (p[1], p[0], p[2])
    return tot


def torsion_cyclic_sum(n: int, h: int, abc: Key3) -> RationalExpr:
    """sum over cyclic (a,b,c) of T^h_mc T^m_ab, T^i_jk = A^i_jk - A^i_kj."""
    R = get_ring(n)
    T = lambda i, j, k: R.A(i, j, k) - R.A(i, k, j)
    a, b, c = abc
    e = R.zero
    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
        for m in range(1, n + 1):
            e = e + T(h, m, z) * T(m, x, y)
    return e
