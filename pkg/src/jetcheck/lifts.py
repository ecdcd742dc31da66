"""Natural lifts of base vector fields and their jet prolongations.

Two independent routes are provided for the first prolongation to
J^1(M x C): :func:`prolong`, a generic total-derivative recursion, and
:func:`lift_product`, which writes out the closed-form components directly.
The test suite checks that they agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Mapping

from .charts import ChartSpec
from .symexpr import RationalExpr, Ring, VarId, get_ring, point_vector


class BaseVectorField:
    """X = u^i d/dx^i on R^n with polynomial components in x."""

    def __init__(self, n: int, components: Iterable):
        ring = get_ring(n)
        comps = tuple(ring.coerce(c) for c in components)
        if len(comps) != n:
            raise ValueError(f"expected {n} components, got {len(comps)}")
        for c in comps:
            if any(v.kind != "x" for v in c.variables()):
                raise ValueError("base vector field components may depend on x only")
        self.n = n
        self.ring = ring
        self.u = comps
        self._d: dict[tuple, RationalExpr] = {}

    @classmethod
    def monomial(cls, n: int, h: int, exponents: tuple[int, ...], coeff=1) -> "BaseVectorField":
        """coeff * x^exponents d/dx^h."""
        ring = get_ring(n)
        m = ring.const(coeff)
        for i, e in enumerate(exponents, start=1):
            m = m * ring.x(i) ** e
        return cls(n, [m if i == h else 0 for i in range(1, n + 1)])

    def du(self, h: int, *xs: int) -> RationalExpr:
        """Partial derivative of u^h with respect to x^{xs[0]}, x^{xs[1]}, ..."""
        key = (h,) + tuple(sorted(xs))
        if key not in self._d:
            e = self.u[h - 1]
            for i in key[1:]:
                e = e.diff(VarId.x(i))
            self._d[key] = e
        return self._d[key]

    def bracket(self, other: "BaseVectorField") -> "BaseVectorField":
        n = self.n
        comps = []
        for i in range(1, n + 1):
            c = self.ring.zero
            for j in range(1, n + 1):
                c = c + self.u[j - 1] * other.du(i, j) - other.u[j - 1] * self.du(i, j)
            comps.append(c)
        return BaseVectorField(n, comps)

    def __add__(self, other):
        return BaseVectorField(self.n, [a + b for a, b in zip(self.u, other.u)])

    def scale(self, c) -> "BaseVectorField":
        return BaseVectorField(self.n, [c * a for a in self.u])

    def __repr__(self):
        return "BaseVectorField(" + ", ".join(str(c) for c in self.u) + ")"


class VectorField:
    """Derivation on a chart: coordinate -> component (missing means zero)."""

    def __init__(self, chart: ChartSpec, components: Mapping[VarId, RationalExpr], label: str = ""):
        coords = set(chart.coordinates())
        comps = {}
        for v, c in components.items():
            if v not in coords:
                raise ValueError(f"{v.name} is not a coordinate of chart {chart.space}")
            if not c.is_zero():
                comps[v] = c
        self.chart = chart
        self.components = comps
        self.label = label

    @property
    def ring(self) -> Ring:
        return get_ring(self.chart.n)

    def __getitem__(self, v: VarId) -> RationalExpr:
        return self.components.get(v, self.ring.zero)

    def apply(self, f: RationalExpr) -> RationalExpr:
        """Lie derivative X(f) = sum_c X^c df/dc."""
        out = self.ring.zero
        fv = f.variables()
        for v, c in self.components.items():
            if v in fv:
                out = out + c * f.diff(v)
        return out

    def bracket(self, other: "VectorField") -> "VectorField":
        """[X, Y]^c = X(Y^c) - Y(X^c), coordinate by coordinate."""
        if other.chart != self.chart:
            raise ValueError("bracket of fields on different charts")
        out = {}
        for v in set(self.components) | set(other.components):
            out[v] = self.apply(other[v]) - other.apply(self[v])
        return VectorField(self.chart, out, f"[{self.label},{other.label}]")

    def __sub__(self, other: "VectorField") -> "VectorField":
        keys = set(self.components) | set(other.components)
        return VectorField(self.chart, {v: self[v] - other[v] for v in keys})

    def __add__(self, other: "VectorField") -> "VectorField":
        keys = set(self.components) | set(other.components)
        return VectorField(self.chart, {v: self[v] + other[v] for v in keys})

    def scale(self, c) -> "VectorField":
        return VectorField(self.chart, {v: c * e for v, e in self.components.items()}, self.label)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.chart == other.chart and self.components == other.components

    def is_zero(self) -> bool:
        return not self.components

    def restrict(self, chart: ChartSpec) -> "VectorField":
        """Drop components outside ``chart`` (which must share the base)."""
        coords = set(chart.coordinates())
        return VectorField(chart, {v: c for v, c in self.components.items() if v in coords}, self.label)

    def values_at(self, point: Mapping[VarId, object]) -> list[Fraction]:
        """Component vector at a rational point, in chart coordinate order."""
        missing = [v for v in self.components if v not in point]
        if missing:
            raise ValueError(f"point has no value for {min(missing).name}")
        vals = point_vector(self.ring, point)
        return [self.components[v].evaluate_vector(vals) if v in self.components else Fraction(0) for v in self.chart.coordinates()]

    def to_json(self) -> dict:
        from .symexpr import to_prefix

        return {v.name: to_prefix(c) for v, c in sorted(self.components.items())}

    def __repr__(self):
        return f"VectorField({self.chart.space}, {len(self.components)} components, {self.label!r})"


# ---------------------------------------------------------------------------
# Lifts to the fibre bundles


def _as_base(u, n) -> BaseVectorField:
    if isinstance(u, BaseVectorField):
        if n is not None and n != u.n:
            raise ValueError(f"field lives on R^{u.n}, not R^{n}")
        return u
    u = list(u)
    return BaseVectorField(n or len(u), u)


def _metric_component(u: BaseVectorField, i: int, j: int) -> RationalExpr:
    R = u.ring
    out = R.zero
    for h in range(1, u.n + 1):
        out = out - u.du(h, i) * R.y(h, j) - u.du(h, j) * R.y(h, i)
    return out


def lift_metric(u, n: int | None = None, signature=None) -> VectorField:
    """X_M on the bundle of metrics."""
    u = _as_base(u, n)
    n = u.n
    R = u.ring
    comps = {VarId.x(i): u.u[i - 1] for i in range(1, n + 1)}
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            comps[VarId.y(i, j)] = _metric_component(u, i, j)
    return VectorField(ChartSpec(n, "M", signature), comps, "X_M")


def _w2(u: BaseVectorField, i, j, k, sym) -> RationalExpr:
    """Connection-fibre component w^i_jk."""
    R = u.ring
    A = lambda a, b, c: R.A(a, b, c, sym)
    out = -u.du(i, j, k)
    for l in range(1, u.n + 1):
        out = out + u.du(i, l) * A(l, j, k) - u.du(l, k) * A(i, j, l) - u.du(l, j) * A(i, l, k)
    return out


def _w3(u: BaseVectorField, i, j, k, h, sym) -> RationalExpr:
    """Connection-jet component w^i_jkh."""
    R = u.ring
    A = lambda a, b, c: R.A(a, b, c, sym)
    A1 = lambda a, b, c, d: R.A1(a, b, c, d, sym)
    out = -u.du(i, h, j, k)
    for l in range(1, u.n + 1):
        out = (
            out
            + u.du(i, h, l) * A(l, j, k)
            - u.du(l, h, k) * A(i, j, l)
            - u.du(l, h, j) * A(i, l, k)
            + u.du(i, l) * A1(l, j, k, h)
            - u.du(l, k) * A1(i, j, l, h)
            - u.du(l, j) * A1(i, l, k, h)
            - u.du(l, h) * A1(i, j, k, l)
        )
    return out


def _v3(u: BaseVectorField, i, j, k) -> RationalExpr:
    """Metric-jet component v_ijk."""
    R = u.ring
    out = R.zero
    for h in range(1, u.n + 1):
        out = (
            out
            - u.du(h, i, k) * R.y(h, j)
            - u.du(h, j, k) * R.y(h, i)
            - u.du(h, i) * R.y1(h, j, k)
            - u.du(h, j) * R.y1(h, i, k)
            - u.du(h, k) * R.y1(i, j, h)
        )
    return out


def _conn_keys(n, sym):
    r = range(1, n + 1)
    return [(i, j, k) for i in r for j in r for k in r if not sym or j <= k]


def lift_connection(u, n: int | None = None, symmetric: bool = False) -> VectorField:
    """X~_C on the bundle of (symmetric) linear connections."""
    u = _as_base(u, n)
    n = u.n
    comps = {VarId.x(i): u.u[i - 1] for i in range(1, n + 1)}
    for i, j, k in _conn_keys(n, symmetric):
        comps[VarId.A(i, j, k)] = _w2(u, i, j, k, symmetric)
    return VectorField(ChartSpec(n, "Csym" if symmetric else "C"), comps, "X_C")


def lift_product(u, n: int | None = None, symmetric: bool = False, signature=None) -> VectorField:
    """First prolongation of (X_M, X~_C) to J^1(M x C), in closed form."""
    u = _as_base(u, n)
    n = u.n
    r = range(1, n + 1)
    comps = {VarId.x(i): u.u[i - 1] for i in r}
    for i in r:
        for j in range(i, n + 1):
            comps[VarId.y(i, j)] = _metric_component(u, i, j)
            for k in r:
                comps[VarId.y1(i, j, k)] = _v3(u, i, j, k)
    for i, j, k in _conn_keys(n, symmetric):
        comps[VarId.A(i, j, k)] = _w2(u, i, j, k, symmetric)
        for h in r:
            comps[VarId.A1(i, j, k, h)] = _w3(u, i, j, k, h, symmetric)
    space = "J1MxCsym" if symmetric else "J1MxC"
    return VectorField(ChartSpec(n, space, signature), comps, "X_bar^(1)")


def lift_metric_prolonged(u, n: int | None = None) -> VectorField:
    """X_M^(1) written out term by term (metric part of the product lift)."""
    u = _as_base(u, n)
    n = u.n
    r = range(1, n + 1)
    comps = {VarId.x(i): u.u[i - 1] for i in r}
    for i in r:
        for j in range(i, n + 1):
            comps[VarId.y(i, j)] = _metric_component(u, i, j)
            for k in r:
                comps[VarId.y1(i, j, k)] = _v3(u, i, j, k)
    return VectorField(ChartSpec(n, "J1M"), comps, "X_M^(1)")


# ---------------------------------------------------------------------------
# Generic prolongation


def _jet_var(v: VarId, extra: tuple[int, ...], sym: bool) -> VarId:
    """Coordinate for d^|extra| v / dx^extra."""
    if v.kind == "y":
        return [None, VarId.y1, VarId.y2, VarId.y3][len(extra)](*v.idx, *extra)
    if v.kind in ("y1", "y2"):
        return _jet_var(VarId("y", v.idx[:2]), v.idx[2:] + extra, sym)
    if v.kind == "A" and len(extra) == 1:
        return VarId.A1(*v.idx, extra[0], sym)
    raise ValueError(f"no jet coordinate for {v.name} of order {len(extra)}")


def total_derivative(f: RationalExpr, k: int, sym: bool = False) -> RationalExpr:
    """Truncated total derivative D_k f: d/dx^k plus the chain rule through
    every fibre and jet coordinate that f depends on."""
    R = f.ring
    out = f.diff(VarId.x(k))
    for v in f.variables():
        if v.kind == "x":
            continue
        out = out + f.diff(v) * R.var(_jet_var(v, (k,), sym))
    return out


def _jet_order(v: VarId) -> int:
    return {"x": -1, "y": 0, "A": 0, "y1": 1, "A1": 1, "y2": 2, "y3": 3}[v.kind]


def prolong(X: VectorField, r: int = 1) -> VectorField:
    """Prolongation X^(r) by the recursion v_{I+j} = D_j v_I - y_{I+k} du^k/dx^j."""
    chart = X.chart
    if chart.order != 0:
        raise ValueError("prolong expects a field on a fibred (order-zero) chart")
    if r < 1:
        raise ValueError("r must be >= 1")
    target = chart.with_space(chart.jet_space(r))
    n = chart.n
    R = get_ring(n)
    sym = chart.symmetric
    u = []
    for i in range(1, n + 1):
        ui = X[VarId.x(i)]
        if any(v.kind != "x" for v in ui.variables()):
            raise ValueError("field does not project to the base")
        u.append(ui)
    base = BaseVectorField(n, u)
    comps = dict(X.components)
    layer = {v: X[v] for v in chart.coordinates() if v.kind != "x"}
    rng = range(1, n + 1)
    for order in range(1, r + 1):
        new = {}
        for v, comp in layer.items():
            lo = v.idx[2:] if v.kind.startswith("y") else v.idx[3:]
            for j in rng:
                if lo and j < lo[-1]:
                    continue  # symmetric derivative indices: keep sorted
                root = VarId("y", v.idx[:2]) if v.kind.startswith("y") else VarId("A", v.idx[:3])
                key = _jet_var(root, lo + (j,), sym)
                val = total_derivative(comp, j, sym)
                for k in rng:
                    duk = base.du(k, j)
                    if not duk.is_zero():
                        val = val - R.var(_jet_var(root, lo + (k,), sym)) * duk
                new[key] = val
        comps.update(new)
        layer = new
    return VectorField(target, comps, f"{X.label}^({r})")


# ---------------------------------------------------------------------------
# Random base fields


def random_base_field(n: int, rng, degree: int = 2, coeff_range: int = 5) -> BaseVectorField:
    ring = get_ring(n)
    comps = []
    for _ in range(n):
        c = ring.zero
        for d in range(degree + 1):
            for mono in combinations_with_replacement(range(1, n + 1), d):
                a = rng.randint(-coeff_range, coeff_range)
                if a:
                    t = ring.const(a)
                    for i in mono:
                        t = t * ring.x(i)
                    c = c + t
        comps.append(c)
    return BaseVectorField(n, comps)


def monomial_fields(n: int, max_degree: int) -> list[BaseVectorField]:
    """All x^I d/dx^h with |I| <= max_degree."""
    out = []
    for d in range(max_degree + 1):
        for mono in combinations_with_replacement(range(1, n + 1), d):
            exps = tuple(mono.count(i) for i in range(1, n + 1))
            for h in range(1, n + 1):
                out.append(BaseVectorField.monomial(n, h, exps))
    return out
