"""The isomorphism zeta: J^1M -> M x C^sym, second-order connections on M,
the retract kappa, and second-order covariant Hamiltonians."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .charts import ChartSpec, inverse_metric
from .connections import EhresmannConn1, gamma_M_cm
from .lifts import total_derivative
from .symexpr import CheckOptions, RationalExpr, VarId, get_ring, substitute, to_prefix

HALF = Fraction(1, 2)


def _w(i: int, j: int) -> Fraction:
    """1/(2 - delta_ij)."""
    return Fraction(1) if i == j else HALF


# ---------------------------------------------------------------------------
# zeta and its inverse


def christoffel(n: int, h: int, i: int, j: int) -> RationalExpr:
    """1/2 y^{hk} (y_ik,j + y_jk,i - y_ij,k) on J^1M."""
    R = get_ring(n)
    yi = inverse_metric(n)
    e = R.zero
    for k in range(1, n + 1):
        e = e + yi(h, k) * (R.y1(i, k, j) + R.y1(j, k, i) - R.y1(i, j, k))
    return e * HALF


@lru_cache(maxsize=None)
def zeta_forward(n: int) -> dict:
    """A^h_ij (i <= j, symmetric coordinates) -> Christoffel symbol."""
    r = range(1, n + 1)
    return {VarId.A(h, i, j, sym=True): christoffel(n, h, i, j) for h in r for i in r for j in range(i, n + 1)}


@lru_cache(maxsize=None)
def zeta_inverse(n: int) -> dict:
    """y_ij,k -> y_hi A^h_jk + y_hj A^h_ik."""
    R = get_ring(n)
    r = range(1, n + 1)
    out = {}
    for i in r:
        for j in range(i, n + 1):
            for k in r:
                e = R.zero
                for h in r:
                    e = e + R.y(h, i) * R.A(h, j, k, True) + R.y(h, j) * R.A(h, i, k, True)
                out[VarId.y1(i, j, k)] = e
    return out


@lru_cache(maxsize=None)
def zeta2(n: int) -> dict:
    """Prolongation of zeta restricted to J^2M, as bindings on
    J^1(M x C^sym): A via zeta_forward, A^h_ij,l via D_l of that binding."""
    out = dict(zeta_forward(n))
    for v, e in zeta_forward(n).items():
        h, i, j = v.idx
        for l in range(1, n + 1):
            out[VarId.A1(h, i, j, l, sym=True)] = total_derivative(e, l)
    return out


def roundtrip_residuals(n: int) -> dict[str, RationalExpr]:
    """Both compositions of zeta and its inverse minus the identity."""
    R = get_ring(n)
    out = {}
    zf, zi = zeta_forward(n), zeta_inverse(n)
    for v, e in zi.items():
        out[f"zeta(zeta^-1)({v.name})"] = substitute(e, zf) - R.var(v)
    for v, e in zf.items():
        out[f"zeta^-1(zeta)({v.name})"] = substitute(e, zi) - R.var(v)
    return out


# ---------------------------------------------------------------------------
# Second-order connections


@dataclass(frozen=True)
class EhresmannConn2:
    """gamma^2 on M: first layer (a, b, r) and second layer (a, b, k, r),
    a <= b, r the differential index."""

    n: int
    first: dict
    second: dict

    @property
    def chart(self) -> ChartSpec:
        return ChartSpec(self.n, "J1M")

    def g1(self, a: int, b: int, r: int) -> RationalExpr:
        return self.first[(min(a, b), max(a, b), r)]

    def g2(self, a: int, b: int, k: int, r: int) -> RationalExpr:
        return self.second[(min(a, b), max(a, b), k, r)]

    def with_second(self, table: dict) -> "EhresmannConn2":
        return EhresmannConn2(self.n, dict(self.first), dict(table))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "first": {f"g_{a}{b}{r}": to_prefix(e) for (a, b, r), e in sorted(self.first.items())},
            "second": {f"g_{a}{b}{k}{r}": to_prefix(e) for (a, b, k, r), e in sorted(self.second.items())},
        }


def _cm_holds(c: EhresmannConn1) -> bool:
    cm = gamma_M_cm(c.n, True)
    return all(c.gamma_M[k] == e for k, e in cm.items())


def gamma2_from_gamma1(c: EhresmannConn1) -> EhresmannConn2:
    if not c.symmetric:
        raise ValueError("gamma^2 is defined for connections on M x C^sym")
    if not _cm_holds(c):
        raise ValueError("connection violates (C_M)")
    for e in c.gamma_C.values():
        if any(v.kind.startswith("y") for v in e.variables()):
            raise ValueError("connection part must not depend on the metric")
    n = c.n
    R = get_ring(n)
    zf = zeta_forward(n)
    A = lambda h, j, k: R.A(h, j, k, True)
    r_ = range(1, n + 1)
    first = {key: substitute(e, zf) for key, e in c.gamma_M.items()}
    second = {}
    for i in r_:
        for j in range(i, n + 1):
            for k in r_:
                for r in r_:
                    e = R.zero
                    for h in r_:
                        e = (
                            e
                            + c.gM(h, i, r) * A(h, j, k)
                            + c.gM(h, j, r) * A(h, i, k)
                            + c.gC(h, j, k, r) * R.y(h, i)
                            + c.gC(h, i, k, r) * R.y(h, j)
                        )
                    second[(i, j, k, r)] = substitute(e, zf)
    return EhresmannConn2(n, first, second)


def gamma1_from_gamma2(c2: EhresmannConn2) -> dict:
    """Recover the connection part gamma^s_ijr (i <= j) on M x C^sym."""
    n = c2.n
    R = get_ring(n)
    zi = zeta_inverse(n)
    yi = inverse_metric(n)
    A = lambda h, j, k: R.A(h, j, k, True)
    r_ = range(1, n + 1)
    G = {key: substitute(e, zi) for key, e in c2.second.items()}
    g1 = {key: substitute(e, zi) for key, e in c2.first.items()}
    GG = lambda a, b, k, r: G[(min(a, b), max(a, b), k, r)]
    gg = lambda a, b, r: g1[(min(a, b), max(a, b), r)]
    out = {}
    for s in r_:
        for i in r_:
            for j in range(i, n + 1):
                for r in r_:
                    e = R.zero
                    for k in r_:
                        t = R.zero
                        for h in r_:
                            t = t + gg(h, k, r) * A(h, i, j)
                        t = t + (GG(i, j, k, r) - GG(j, k, i, r) - GG(k, i, j, r)) * HALF
                        e = e - t * yi(k, s)
                    out[(s, i, j, r)] = e
    return out


def second_order_condition_residuals(c2: EhresmannConn2) -> dict[tuple, RationalExpr]:
    """(g_ijkr - g_ijrk) + (g_irjk - g_irkj) + (g_rjki - g_rjik) for all indices."""
    n = c2.n
    g = c2.g2
    r_ = range(1, n + 1)
    out = {}
    for i in r_:
        for j in r_:
            for k in r_:
                for r in r_:
                    out[(i, j, k, r)] = (
                        (g(i, j, k, r) - g(i, j, r, k)) + (g(i, r, j, k) - g(i, r, k, j)) + (g(r, j, k, i) - g(r, j, i, k))
                    )
    return out


def gamma1_zeta_residuals(c2: EhresmannConn2) -> dict[tuple, RationalExpr]:
    R = get_ring(c2.n)
    return {key: e + R.y1(*key) for key, e in c2.first.items()}


# ---------------------------------------------------------------------------
# The retract kappa


@lru_cache(maxsize=None)
def kappa(n: int) -> dict:
    """Bindings J^2M coordinate -> expression on J^1(M x C^sym)."""
    R = get_ring(n)
    A = lambda h, j, k: R.A(h, j, k, True)
    A1 = lambda h, j, k, l: R.A1(h, j, k, l, True)
    r_ = range(1, n + 1)

    def dg(a, b, l):
        e = R.zero
        for m in r_:
            e = e + R.y(m, a) * A(m, b, l) + R.y(m, b) * A(m, a, l)
        return e

    def second(i, j, k, l):
        e = R.zero
        for h in r_:
            e = e + dg(h, i, l) * A(h, j, k) + R.y(h, i) * A1(h, j, k, l)
            e = e + dg(h, j, l) * A(h, i, k) + R.y(h, j) * A1(h, i, k, l)
        return e

    out = {}
    for a in r_:
        for b in range(a, n + 1):
            for k in r_:
                out[VarId.y1(a, b, k)] = dg(a, b, k)
                for l in range(k, n + 1):
                    out[VarId.y2(a, b, k, l)] = (second(a, b, k, l) + second(a, b, l, k)) * HALF
    return out


def kappa_zeta2_residuals(n: int) -> dict[str, RationalExpr]:
    """kappa o zeta^2 minus the identity, coordinate by coordinate on J^2M."""
    R = get_ring(n)
    z2 = zeta2(n)
    k = kappa(n)
    out = {}
    for v in ChartSpec(n, "J2M").coordinates():
        out[v.name] = substitute(k.get(v, R.var(v)), z2) - R.var(v)
    return out


# ---------------------------------------------------------------------------
# Legendre data and covariant Hamiltonians


def _jet2_vars(n):
    r_ = range(1, n + 1)
    return [(a, b, i, j) for a in r_ for b in range(a, n + 1) for i in r_ for j in r_]


def _check_J2(L: RationalExpr, n: int) -> None:
    coords = set(ChartSpec(n, "J2M").coordinates())
    extra = sorted(v for v in L.variables() if v not in coords)
    if extra:
        raise ValueError(f"expression is not over J2M: uses {extra[0].name}")


def _strip_second(L: RationalExpr) -> RationalExpr:
    """L' = L with every second-order jet coordinate set to zero."""
    R = L.ring
    b = {v: R.zero for v in L.variables() if v.kind == "y2"}
    return substitute(L, b) if b else L


def legendre_first_general(L: RationalExpr, n: int) -> dict:
    """L^{i,kl} = dL/dy_kl,i - sum_j 1/(2-d_ij) D_j(dL/dy_kl,ij); may involve
    third-order coordinates."""
    r_ = range(1, n + 1)
    out = {}
    for k in r_:
        for l in range(k, n + 1):
            for i in r_:
                e = L.diff(VarId.y1(k, l, i))
                for j in r_:
                    d = L.diff(VarId.y2(k, l, i, j))
                    if not d.is_zero():
                        e = e - total_derivative(d, j) * _w(i, j)
                out[(i, k, l)] = e
    return out


@dataclass
class LegendreData:
    n: int
    second: dict  # (i, j, k, l) -> L^{ij,kl}
    first: dict  # (i, k, l) -> L^{i,kl}
    L_i: dict  # i -> L^i
    H: RationalExpr
    momenta: dict  # (k, l, i) -> p_kl,i

    @property
    def projectable(self) -> bool:
        """Every L^{ij,kl} is free of jet coordinates."""
        return not self.jet_dependent()

    def jet_dependent(self) -> list[tuple]:
        bad = []
        for key, e in sorted(self.second.items()):
            if any(v.kind in ("y1", "y2", "y3") for v in e.variables()):
                bad.append(key)
        return bad

    def to_json(self) -> dict:
        return {
            "projectable": self.projectable,
            "L^ij,kl": {f"L^{i}{j},{k}{l}": to_prefix(e) for (i, j, k, l), e in sorted(self.second.items())},
            "L^i,kl": {f"L^{i},{k}{l}": to_prefix(e) for (i, k, l), e in sorted(self.first.items())},
            "H": to_prefix(self.H),
            "p": {f"p_{k}{l},{i}": to_prefix(e) for (k, l, i), e in sorted(self.momenta.items())},
        }


def legendre(L: RationalExpr, n: int) -> LegendreData:
    """Legendre coefficients of a Lagrangian affine in second derivatives."""
    _check_J2(L, n)
    R = get_ring(n)
    r_ = range(1, n + 1)
    Lp = _strip_second(L)
    second = {}
    for k in r_:
        for l in range(k, n + 1):
            for i in r_:
                for j in r_:
                    second[(i, j, k, l)] = L.diff(VarId.y2(k, l, i, j)) * _w(i, j)
    first = {}
    for k in r_:
        for l in range(k, n + 1):
            for i in r_:
                e = Lp.diff(VarId.y1(k, l, i))
                for j in r_:
                    d = second[(i, j, k, l)]
                    if d.is_zero():
                        continue
                    for a in r_:
                        for b in range(a, n + 1):
                            dd = d.diff(VarId.y(a, b))
                            if not dd.is_zero():
                                e = e - R.y1(a, b, j) * dd
                first[(i, k, l)] = e
    L_i = {}
    for i in r_:
        e = R.zero
        for k in r_:
            for l in range(k, n + 1):
                for j in r_:
                    e = e + second[(i, j, k, l)] * R.y1(k, l, j)
        L_i[i] = e
    H = Lp
    for (i, k, l), e in first.items():
        H = H - e * R.y1(k, l, i)
    momenta = {}
    for (i, k, l), e in first.items():
        momenta[(k, l, i)] = e - L_i[i].diff(VarId.y(k, l))
    return LegendreData(n, second, first, L_i, H, momenta)


def legendre_consistency(data: LegendreData) -> dict[tuple, RationalExpr]:
    """L^{ij,kl} - dL^i/dy_kl,j."""
    return {
        (i, j, k, l): e - data.L_i[i].diff(VarId.y1(k, l, j)) for (i, j, k, l), e in data.second.items()
    }


def covariant_hamiltonian2(L: RationalExpr, c2: EhresmannConn2) -> RationalExpr:
    """L^{gamma^2} = (g_ar + y_a,r) L^{r}_a + (g_a,ij + y_a,ij) L^{ij}_a - L."""
    n = c2.n
    _check_J2(L, n)
    R = get_ring(n)
    out = -L
    Lvars = L.variables()
    for a, b, i, j in _jet2_vars(n):
        v = VarId.y2(a, b, i, j)
        if v in Lvars:
            out = out + (c2.g2(a, b, i, j) + R.var(v)) * L.diff(v) * _w(i, j)
    first_terms = {key: e + R.y1(*key) for key, e in c2.first.items()}
    if any(not e.is_zero() for e in first_terms.values()):
        Li = legendre_first_general(L, n)
        for (a, b, r), e in first_terms.items():
            if not e.is_zero():
                out = out + e * Li[(r, a, b)]
    return out


def pullback_zeta2(Lp: RationalExpr) -> RationalExpr:
    """L' o zeta^2 for L' on J^1(M x C^sym)."""
    return substitute(Lp, zeta2(Lp.ring.n))


def pullback_kappa(L: RationalExpr) -> RationalExpr:
    """L o kappa for L on J^2M."""
    return substitute(L, kappa(L.ring.n))
