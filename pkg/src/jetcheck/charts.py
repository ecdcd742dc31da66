"""Fibred coordinate charts over R^n and the symbolic inverse metric."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, permutations
from math import comb

from .symexpr import RationalExpr, VarId, get_ring

SPACES = (
    "M", "C", "Csym", "MxC", "MxCsym",
    "J1M", "J2M", "J3M",
    "J1C", "J1Csym", "J1MxC", "J1MxCsym",
)

# (fibre parts, jet order) per space; fibre parts among "M", "C", "Csym"
_LAYOUT = {
    "M": (("M",), 0),
    "C": (("C",), 0),
    "Csym": (("Csym",), 0),
    "MxC": (("M", "C"), 0),
    "MxCsym": (("M", "Csym"), 0),
    "J1M": (("M",), 1),
    "J2M": (("M",), 2),
    "J3M": (("M",), 3),
    "J1C": (("C",), 1),
    "J1Csym": (("Csym",), 1),
    "J1MxC": (("M", "C"), 1),
    "J1MxCsym": (("M", "Csym"), 1),
}


@dataclass(frozen=True)
class ChartSpec:
    n: int
    space: str
    signature: tuple[int, int] | None = None

    def __post_init__(self):
        if self.n not in (2, 3, 4):
            raise ValueError(f"unsupported base dimension n={self.n} (2 <= n <= 4)")
        if self.space not in _LAYOUT:
            raise ValueError(f"unknown chart space {self.space!r}")
        if self.signature is None:
            object.__setattr__(self, "signature", (self.n, 0))
        p, m = self.signature
        if p < 0 or m < 0 or p + m != self.n:
            raise ValueError(f"signature {self.signature} does not sum to n={self.n}")

    @property
    def fibre_parts(self) -> tuple[str, ...]:
        return _LAYOUT[self.space][0]

    @property
    def order(self) -> int:
        return _LAYOUT[self.space][1]

    @property
    def symmetric(self) -> bool:
        return "Csym" in self.fibre_parts

    @property
    def has_metric(self) -> bool:
        return "M" in self.fibre_parts

    @property
    def has_connection(self) -> bool:
        return any(p.startswith("C") for p in self.fibre_parts)

    def with_space(self, space: str) -> "ChartSpec":
        return ChartSpec(self.n, space, self.signature)

    def base_space(self) -> str:
        """The fibred (order-zero) space this jet chart sits over."""
        parts = self.fibre_parts
        return {("M",): "M", ("C",): "C", ("Csym",): "Csym", ("M", "C"): "MxC", ("M", "Csym"): "MxCsym"}[parts]

    def jet_space(self, r: int) -> str:
        name = f"J{r}{self.base_space()}"
        if name not in _LAYOUT:
            raise ValueError(f"no order-{r} jet chart over {self.base_space()}")
        return name

    def coordinates(self) -> tuple[VarId, ...]:
        return chart_coordinates(self.n, self.space)

    def ring(self):
        return get_ring(self.n)

    def to_json(self) -> dict:
        return chart_json(self)


def _pairs(n):
    return [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]


def _metric_fibre(n):
    return [VarId("y", p) for p in _pairs(n)]


def _conn_fibre(n, sym):
    r = range(1, n + 1)
    return [VarId("A", (i, j, k)) for i in r for j in r for k in r if not sym or j <= k]


@lru_cache(maxsize=None)
def chart_coordinates(n: int, space: str) -> tuple[VarId, ...]:
    """Coordinates in canonical order: base, fibre, then jet layers."""
    parts, order = _LAYOUT[space]
    r = range(1, n + 1)
    coords = [VarId.x(i) for i in r]
    fibre_m = _metric_fibre(n) if "M" in parts else []
    fibre_c = []
    for p in parts:
        if p.startswith("C"):
            fibre_c = _conn_fibre(n, p == "Csym")
    coords += fibre_m + fibre_c
    if order >= 1:
        coords += [VarId("y1", v.idx + (k,)) for v in fibre_m for k in r]
        coords += [VarId("A1", v.idx + (l,)) for v in fibre_c for l in r]
    if order >= 2:
        coords += [VarId("y2", v.idx + kl) for v in fibre_m for kl in combinations_with_replacement(r, 2)]
    if order >= 3:
        coords += [VarId("y3", v.idx + klm) for v in fibre_m for klm in combinations_with_replacement(r, 3)]
    assert coords == sorted(coords)
    return tuple(coords)


@dataclass(frozen=True)
class ChartDims:
    base: int
    fibre: int
    jet1: int
    jet2: int
    jet3: int
    total: int


def chart_dims(spec: ChartSpec) -> ChartDims:
    """Closed-form coordinate counts, cross-checked against the enumeration."""
    n = spec.n
    fibre = 0
    for p in spec.fibre_parts:
        fibre += {"M": n * (n + 1) // 2, "C": n**3, "Csym": n * n * (n + 1) // 2}[p]
    order = spec.order
    jet1 = fibre * n if order >= 1 else 0
    jet2 = fibre * comb(n + 1, 2) if order >= 2 else 0
    jet3 = fibre * comb(n + 2, 3) if order >= 3 else 0
    total = n + fibre + jet1 + jet2 + jet3
    if total != len(spec.coordinates()):
        raise AssertionError("coordinate enumeration disagrees with closed form")
    return ChartDims(n, fibre, jet1, jet2, jet3, total)


_SYMMETRY_CLASSES = {
    "y": "y_ij = y_ji (stored i <= j)",
    "y1": "y_ij,k = y_ji,k (stored i <= j)",
    "y2": "y_ij,kl symmetric in (i,j) and in (k,l) (stored sorted)",
    "y3": "y_ij,klm symmetric in (i,j) and in (k,l,m) (stored sorted)",
    "A": "A^i_jk, no symmetry",
    "Asym": "A^i_jk = A^i_kj (stored j <= k)",
    "A1": "A^i_jk,l, no symmetry",
    "A1sym": "A^i_jk,l = A^i_kj,l (stored j <= k)",
}


def chart_json(spec: ChartSpec) -> dict:
    coords = spec.coordinates()
    kinds = []
    for v in coords:
        k = v.kind
        if k in ("A", "A1") and spec.symmetric:
            k += "sym"
        if k not in kinds and k != "x":
            kinds.append(k)
    d = chart_dims(spec)
    return {
        "n": spec.n,
        "signature": list(spec.signature),
        "space": spec.space,
        "coordinates": [v.name for v in coords],
        "dims": {"base": d.base, "fibre": d.fibre, "jet1": d.jet1, "jet2": d.jet2, "jet3": d.jet3, "total": d.total},
        "symmetry": {k: _SYMMETRY_CLASSES[k] for k in kinds},
    }


# ---------------------------------------------------------------------------
# Metric helpers


def metric_matrix(n: int) -> list[list[RationalExpr]]:
    R = get_ring(n)
    return [[R.y(i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]


def _det(m: list[list[RationalExpr]]) -> RationalExpr:
    # Leibniz expansion; n <= 4
    n = len(m)
    ring = m[0][0].ring
    total = ring.zero
    for perm in permutations(range(n)):
        sign = 1
        for a in range(n):
            for b in range(a + 1, n):
                if perm[a] > perm[b]:
                    sign = -sign
        term = ring.one
        for a in range(n):
            term = term * m[a][perm[a]]
        total = total + term if sign > 0 else total - term
    return total


@lru_cache(maxsize=None)
def metric_det(n: int) -> RationalExpr:
    return _det(metric_matrix(n))


class InverseMetric:
    """Symbolic y^{ij}: the inverse of the matrix (y_ij), by adjugate / det."""

    def __init__(self, n: int):
        self.n = n
        m = metric_matrix(n)
        det = metric_det(n)
        inv = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                minor = [[m[a][b] for b in range(n) if b != i] for a in range(n) if a != j]
                cof = _det(minor) if n > 1 else m[0][0].ring.one
                if (i + j) % 2:
                    cof = -cof
                inv[i][j] = inv[j][i] = cof / det
        self._inv = inv

    def __call__(self, i: int, j: int) -> RationalExpr:
        """y^{ij}, 1-based indices."""
        return self._inv[i - 1][j - 1]

    def matrix(self) -> list[list[RationalExpr]]:
        return [row[:] for row in self._inv]


@lru_cache(maxsize=None)
def inverse_metric(n: int) -> InverseMetric:
    if n not in (2, 3, 4):
        raise ValueError(f"unsupported base dimension n={n}")
    return InverseMetric(n)


def metric_point_ok(point: dict, n: int, signature: tuple[int, int]) -> bool:
    """True if the y-values of ``point`` form a metric of the given signature.

    Only the sign of det(y) is checked, i.e. (-1)^{n-}; that is the condition
    under which the volume density would be real.
    """
    from fractions import Fraction

    rows = [[Fraction(point.get(VarId.y(i, j), 0)) for j in range(1, n + 1)] for i in range(1, n + 1)]
    d = _frac_det(rows)
    if d == 0:
        return False
    return (d > 0) == (signature[1] % 2 == 0)


def _frac_det(rows):
    rows = [r[:] for r in rows]
    n = len(rows)
    det = 1
    for c in range(n):
        p = next((r for r in range(c, n) if rows[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            det = -det
        det *= rows[c][c]
        for r in range(c + 1, n):
            f = rows[r][c] / rows[c][c]
            if f:
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
    return det
