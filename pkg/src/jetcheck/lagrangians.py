"""Concrete Lagrangian functions and the zero-Hamiltonian characterization.

All Lagrangians are scalar functions (the density divided by the metric
volume form), so the factor sqrt|det y| never appears.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .charts import ChartSpec, inverse_metric
from .connections import EhresmannConn1, covariant_hamiltonian1
from .lifts import total_derivative
from .secondorder import christoffel
from .symexpr import CheckOptions, RationalExpr, VarId, Verdict, get_ring


@dataclass(frozen=True)
class Lagrangian:
    chart: ChartSpec
    expr: RationalExpr
    name: str = ""

    def __post_init__(self):
        coords = set(self.chart.coordinates())
        extra = [v for v in self.expr.variables() if v not in coords]
        if extra:
            raise ValueError(f"{self.name or 'expression'} uses {min(extra).name}, not a coordinate of {self.chart.space}")


@lru_cache(maxsize=None)
def palatini(n: int) -> Lagrangian:
    """y^{ij}(A^k_ij,k - A^k_ik,j + A^m_ij A^k_km - A^m_ik A^k_jm)."""
    R = get_ring(n)
    yi = inverse_metric(n)
    A = lambda i, j, k: R.A(i, j, k, True)
    A1 = lambda i, j, k, l: R.A1(i, j, k, l, True)
    r = range(1, n + 1)
    e = R.zero
    for i in r:
        for j in r:
            t = R.zero
            for k in r:
                t = t + A1(k, i, j, k) - A1(k, i, k, j)
                for m in r:
                    t = t + A(m, i, j) * A(k, k, m) - A(m, i, k) * A(k, j, m)
            e = e + yi(i, j) * t
    return Lagrangian(ChartSpec(n, "J1MxCsym"), e, "palatini")


def _c(R, a, b, d):
    """y_ad,b + y_bd,a - y_ab,d."""
    return R.y1(a, d, b) + R.y1(b, d, a) - R.y1(a, b, d)


@lru_cache(maxsize=None)
def einstein_hilbert_prime(n: int) -> RationalExpr:
    """First-order part of the local expression of L_EH."""
    R = get_ring(n)
    g = inverse_metric(n)
    r = range(1, n + 1)
    half = Fraction(1, 2)
    out = R.zero
    for i in r:
        for j in r:
            acc = R.zero
            for h in r:
                for m in r:
                    for rr in r:
                        for d in r:
                            acc = acc + g(h, m) * R.y1(m, rr, j) * g(rr, d) * _c(R, i, h, d)
                            acc = acc - g(h, m) * R.y1(m, rr, h) * g(rr, d) * _c(R, i, j, d)
                            acc = acc + half * g(h, rr) * g(m, d) * _c(R, i, j, d) * _c(R, h, m, rr)
                            acc = acc - half * g(h, rr) * g(m, d) * _c(R, i, h, d) * _c(R, j, m, rr)
            out = out + g(i, j) * acc
    return out * half


@lru_cache(maxsize=None)
def einstein_hilbert(n: int) -> Lagrangian:
    """Transcribed local expression: second-order part plus L'_EH."""
    R = get_ring(n)
    g = inverse_metric(n)
    r = range(1, n + 1)
    e = R.zero
    for i in r:
        for j in r:
            for h in r:
                for d in r:
                    e = e + g(i, j) * g(h, d) * (R.y2(d, j, h, i) - R.y2(i, j, d, h) - R.y2(d, h, i, j) + R.y2(h, i, d, j))
    e = e * Fraction(1, 2) + einstein_hilbert_prime(n)
    return Lagrangian(ChartSpec(n, "J2M"), e, "einstein-hilbert")


@lru_cache(maxsize=None)
def einstein_hilbert_curvature(n: int) -> Lagrangian:
    """Scalar curvature y^{ij} R^h_ihj built from Christoffel symbols and
    their total derivatives."""
    R = get_ring(n)
    g = inverse_metric(n)
    r = range(1, n + 1)
    G = {(h, i, j): christoffel(n, h, i, j) for h in r for i in r for j in r}
    e = R.zero
    for i in r:
        for j in r:
            ric = R.zero
            for h in r:
                ric = ric + total_derivative(G[(h, i, j)], h) - total_derivative(G[(h, i, h)], j)
                for m in r:
                    ric = ric + G[(m, i, j)] * G[(h, h, m)] - G[(m, i, h)] * G[(h, j, m)]
            e = e + g(i, j) * ric
    return Lagrangian(ChartSpec(n, "J2M"), e, "einstein-hilbert-curvature")


def compose_poly(L: Lagrangian, coeffs: Sequence) -> Lagrangian:
    """f(L) for f = sum coeffs[k] t^k."""
    R = L.expr.ring
    out = R.zero
    for c in reversed(list(coeffs)):
        out = out * L.expr + c
    return Lagrangian(L.chart, out, f"f({L.name})")


def poly_derivative(coeffs: Sequence) -> list:
    return [k * c for k, c in enumerate(coeffs)][1:] or [0]


def poly_eval(coeffs: Sequence, e: RationalExpr) -> RationalExpr:
    out = e.ring.zero
    for c in reversed(list(coeffs)):
        out = out * e + c
    return out


NAMED = ("palatini", "einstein-hilbert", "eh-squared", "einstein-hilbert-curvature")


def named(name: str, n: int) -> Lagrangian:
    if name == "palatini":
        return palatini(n)
    if name == "einstein-hilbert":
        return einstein_hilbert(n)
    if name == "eh-squared":
        return compose_poly(einstein_hilbert(n), [0, 0, 1])
    if name == "einstein-hilbert-curvature":
        return einstein_hilbert_curvature(n)
    raise KeyError(f"unknown Lagrangian {name!r} (known: {', '.join(NAMED)})")


# ---------------------------------------------------------------------------
# Zero covariant Hamiltonian


@dataclass
class ZeroHamiltonianVerdict:
    affine: bool  # condition i
    reproducing: bool  # condition ii
    hamiltonian_zero: bool
    witnesses: dict

    @property
    def consistent(self) -> bool:
        return self.hamiltonian_zero == (self.affine and self.reproducing)

    def to_json(self) -> dict:
        return {
            "condition_i": self.affine,
            "condition_ii": self.reproducing,
            "hamiltonian_zero": self.hamiltonian_zero,
            "consistent": self.consistent,
            "witnesses": self.witnesses,
        }


def zero_hamiltonian_test(L: Lagrangian | RationalExpr, c: EhresmannConn1, opts: CheckOptions | None = None) -> ZeroHamiltonianVerdict:
    opts = opts or CheckOptions()
    expr = L.expr if isinstance(L, Lagrangian) else L
    jets = [v for v in c.jet_chart.coordinates() if v.kind in ("y1", "A1")]
    used = [v for v in jets if v in expr.variables()]
    witnesses = {}
    affine = True
    for a_i, a in enumerate(used):
        da = expr.diff(a)
        for b in used[a_i:]:
            v = opts.check(da.diff(b), f"zh:i:{a.name}:{b.name}")
            if not v.zero:
                affine = False
                witnesses["condition_i"] = {"pair": [a.name, b.name], **v.to_json()}
                break
        if not affine:
            break
    D = c.D()
    v2 = opts.check(expr - D.apply(expr), "zh:ii")
    if not v2.zero:
        witnesses["condition_ii"] = v2.to_json()
    v3 = opts.check(covariant_hamiltonian1(expr, c), "zh:H")
    if not v3.zero:
        witnesses["hamiltonian"] = v3.to_json()
    return ZeroHamiltonianVerdict(affine, v2.zero, v3.zero, witnesses)


def zero_hamiltonian_corpus(c: EhresmannConn1, rng) -> list[tuple[str, RationalExpr, bool]]:
    """Twenty Lagrangians polynomial in the jets on c's chart, with the
    expected value of "L^gamma = 0".  Half pass, half fail."""
    n = c.n
    R = get_ring(n)
    sym = c.symmetric
    P = palatini(n).expr if sym else None
    # "reproducing" building blocks: jet + gamma, annihilated by D^gamma - 1
    blocks = []
    for (k, l, j), g in sorted(c.gamma_M.items()):
        blocks.append(R.y1(k, l, j) + g)
    for (h, s, t, r), g in sorted(c.gamma_C.items()):
        blocks.append(R.A1(h, s, t, r, sym) + g)
    fibre = [R.var(v) for v in c.chart.coordinates() if v.kind in ("y", "A")]

    def rcoef():
        e = R.const(rng.randint(-5, 5))
        for _ in range(2):
            e = e + rng.randint(-5, 5) * rng.choice(fibre)
        return e

    def rcomb(k):
        e = R.zero
        for b in rng.sample(blocks, k):
            e = e + rcoef() * b
        return e

    y111 = R.y1(1, 1, 1)
    g111 = c.gM(1, 1, 1)
    out = [
        ("y_11,1 + g_111", y111 + g111, True),
        ("3 (y_12,2 + g_122) y_11", 3 * (R.y1(1, 2, 2) + c.gM(1, 2, 2)) * R.y(1, 1), True),
        ("zero", R.zero, True),
    ]
    for k in range(1, 6):
        out.append((f"random reproducing combination {k}", rcomb(k + 1), True))
    if P is not None:
        out.append(("palatini", P, True))
        out.append(("palatini - 2 (y_11,1 + g_111) y_22", P - 2 * (y111 + g111) * R.y(2, 2), True))
    else:
        out.append(("random reproducing combination 6", rcomb(4), True))
        out.append(("random reproducing combination 7", rcomb(5), True))
    fails = [
        ("y_11,1", y111),
        ("y_11,1 - g_111", y111 - g111),
        ("(y_11,1)^2", y111 * y111),
        ("constant 5", R.const(5)),
        ("y_11", R.y(1, 1)),
        ("(y_11,1 + g_111)^2", (y111 + g111) ** 2),
        ("reproducing + 1", rcomb(3) + 1),
        ("reproducing + y_11,2", rcomb(2) + R.y1(1, 1, 2)),
    ]
    if P is not None:
        fails += [("palatini + 1", P + 1), ("palatini^2", P * P)]
    else:
        fails += [("y_11,1 * y_12,1", y111 * R.y1(1, 2, 1)), ("reproducing - 7", rcomb(2) - 7)]
    out += [(name, e, False) for name, e in fails]
    return out


# ---------------------------------------------------------------------------
# Invariants on the full bundle J^1(M x C)


@lru_cache(maxsize=None)
def ricci_scalar_general(n: int) -> Lagrangian:
    """y^{ij} R^p_{ipj} for a connection with torsion; the first lower index
    of A^i_jk is the differentiating direction."""
    R = get_ring(n)
    yi = inverse_metric(n)
    r = range(1, n + 1)
    e = R.zero
    for i in r:
        for j in r:
            t = R.zero
            for p in r:
                t = t + R.A1(p, i, j, p) - R.A1(p, p, j, i)
                for l in r:
                    t = t + R.A(p, p, l) * R.A(l, i, j) - R.A(p, i, l) * R.A(l, p, j)
            e = e + yi(i, j) * t
    return Lagrangian(ChartSpec(n, "J1MxC"), e, "ricci-general")


@lru_cache(maxsize=None)
def torsion_square(n: int) -> Lagrangian:
    """y_ab y^cd y^ef T^a_ce T^b_df."""
    R = get_ring(n)
    yi = inverse_metric(n)
    r = range(1, n + 1)
    T = lambda h, a, b: R.A(h, a, b) - R.A(h, b, a)
    e = R.zero
    for a in r:
        for b in r:
            for c in r:
                for d in r:
                    for f in r:
                        for g in r:
                            e = e + R.y(a, b) * yi(c, d) * yi(f, g) * T(a, c, f) * T(b, d, g)
    return Lagrangian(ChartSpec(n, "J1MxC"), e, "torsion-square")
