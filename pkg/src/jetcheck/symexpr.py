"""Exact multivariate rational functions over Q.

Every coordinate expression in the package is a :class:`RationalExpr`: a pair
``num/den`` of polynomials with rational coefficients, kept reduced (no common
nonconstant factor) with a monic denominator under the graded-lexicographic
order of the ring's variables.  Equal expressions therefore have identical
representations and equality is a syntactic test.

Polynomial arithmetic and GCDs are delegated to FLINT's ``fmpq_mpoly``.
"""

from __future__ import annotations

import hashlib
import json
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Callable, Iterable, Mapping

import flint

__all__ = [
    "VarId",
    "Ring",
    "RationalExpr",
    "Verdict",
    "CheckOptions",
    "SymExprError",
    "DegenerateSamplingError",
    "normalize",
    "diff",
    "substitute",
    "identity_check",
    "to_prefix",
    "from_prefix",
    "to_json_ast",
    "from_json_ast",
    "random_point",
]


class SymExprError(ArithmeticError):
    pass


class DegenerateSamplingError(SymExprError):
    pass


# ---------------------------------------------------------------------------
# Variables

# x: base, y: metric, A: connection, y1/A1: first jets, y2: second metric
# jets, y3: third metric jets.  The order fixes the monomial order and the
# coordinate order of every chart.
KIND_ORDER = {"x": 0, "y": 1, "A": 2, "y1": 3, "A1": 4, "y2": 5, "y3": 6}


@dataclass(frozen=True, order=False)
class VarId:
    """A chart coordinate: kind tag plus 1-based index tuple.

    Use the factory functions (:meth:`y`, :meth:`A`, ...) to get canonical
    instances; they sort the symmetric index groups.
    """

    kind: str
    idx: tuple[int, ...]

    def sort_key(self) -> tuple:
        return (KIND_ORDER[self.kind], self.idx)

    def __lt__(self, other: "VarId") -> bool:
        return self.sort_key() < other.sort_key()

    # -- canonical constructors ------------------------------------------
    @staticmethod
    def x(i: int) -> "VarId":
        return VarId("x", (i,))

    @staticmethod
    def y(i: int, j: int) -> "VarId":
        return VarId("y", tuple(sorted((i, j))))

    @staticmethod
    def y1(i: int, j: int, k: int) -> "VarId":
        return VarId("y1", tuple(sorted((i, j))) + (k,))

    @staticmethod
    def y2(i: int, j: int, k: int, l: int) -> "VarId":
        return VarId("y2", tuple(sorted((i, j))) + tuple(sorted((k, l))))

    @staticmethod
    def y3(i: int, j: int, k: int, l: int, m: int) -> "VarId":
        return VarId("y3", tuple(sorted((i, j))) + tuple(sorted((k, l, m))))

    @staticmethod
    def A(i: int, j: int, k: int, sym: bool = False) -> "VarId":
        if sym and j > k:
            j, k = k, j
        return VarId("A", (i, j, k))

    @staticmethod
    def A1(i: int, j: int, k: int, l: int, sym: bool = False) -> "VarId":
        if sym and j > k:
            j, k = k, j
        return VarId("A1", (i, j, k, l))

    @property
    def name(self) -> str:
        d = "".join(str(i) for i in self.idx)
        k = self.kind
        if k == "x":
            return f"x{d}"
        if k == "y":
            return f"y_{d}"
        if k == "y1":
            return f"y_{d[:2]},{d[2:]}"
        if k in ("y2", "y3"):
            return f"y_{d[:2]},{d[2:]}"
        if k == "A":
            return f"A^{d[0]}_{d[1:]}"
        if k == "A1":
            return f"A^{d[0]}_{d[1:3]},{d[3:]}"
        raise ValueError(k)

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"VarId({self.name})"


_NAME_RE = re.compile(
    r"^(?:x(?P<x>\d)|y_(?P<y>\d\d)(?:,(?P<yj>\d{1,3}))?|A\^(?P<Au>\d)_(?P<Al>\d\d)(?:,(?P<Aj>\d))?)$"
)


def parse_var_name(name: str) -> VarId:
    m = _NAME_RE.match(name)
    if m is None:
        raise ValueError(f"not a coordinate name: {name!r}")
    if m["x"]:
        return VarId.x(int(m["x"]))
    if m["y"]:
        ij = tuple(int(c) for c in m["y"])
        if m["yj"] is None:
            return VarId.y(*ij)
        jet = tuple(int(c) for c in m["yj"])
        kind = {1: "y1", 2: "y2", 3: "y3"}[len(jet)]
        return getattr(VarId, kind)(*ij, *jet)
    up = int(m["Au"])
    lo = tuple(int(c) for c in m["Al"])
    if m["Aj"] is None:
        return VarId("A", (up,) + lo)
    return VarId("A1", (up,) + lo + (int(m["Aj"]),))


def all_variables(n: int) -> tuple[VarId, ...]:
    r = range(1, n + 1)
    pairs = [(i, j) for i in r for j in r if i <= j]
    out: list[VarId] = [VarId.x(i) for i in r]
    out += [VarId("y", p) for p in pairs]
    out += [VarId("A", (i, j, k)) for i in r for j in r for k in r]
    out += [VarId("y1", p + (k,)) for p in pairs for k in r]
    out += [VarId("A1", (i, j, k, l)) for i in r for j in r for k in r for l in r]
    out += [VarId("y2", p + kl) for p in pairs for kl in combinations_with_replacement(r, 2)]
    out += [VarId("y3", p + klm) for p in pairs for klm in combinations_with_replacement(r, 3)]
    assert out == sorted(out)
    return tuple(out)


# ---------------------------------------------------------------------------
# Ring


class Ring:
    """Polynomial ring Q[all coordinates for base dimension n]."""

    def __init__(self, n: int):
        if not 1 <= n <= 4:
            raise ValueError(f"unsupported base dimension n={n}")
        self.n = n
        self.vars = all_variables(n)
        self.index = {v: i for i, v in enumerate(self.vars)}
        self.ctx = flint.fmpq_mpoly_ctx.get(tuple(f"v{i}" for i in range(len(self.vars))), "deglex")
        self._gens = self.ctx.gens()
        self.zero = RationalExpr(self, self.ctx.from_dict({}), self.ctx.constant(1))
        self.one = RationalExpr(self, self.ctx.constant(1), self.ctx.constant(1))

    def __repr__(self) -> str:
        return f"Ring(n={self.n})"

    def __reduce__(self):
        return (get_ring, (self.n,))

    def gen(self, v: VarId) -> flint.fmpq_mpoly:
        return self._gens[self.index[v]]

    def var(self, v: VarId) -> "RationalExpr":
        return RationalExpr(self, self.gen(v), self.ctx.constant(1))

    def const(self, c) -> "RationalExpr":
        c = Fraction(c)
        return RationalExpr(self, self.ctx.constant(flint.fmpq(c.numerator, c.denominator)), self.ctx.constant(1))

    def coerce(self, c) -> "RationalExpr":
        if isinstance(c, RationalExpr):
            if c.ring is not self:
                raise SymExprError("expressions from different rings")
            return c
        return self.const(c)

    # shorthand accessors
    def x(self, i):
        return self.var(VarId.x(i))

    def y(self, i, j):
        return self.var(VarId.y(i, j))

    def y1(self, i, j, k):
        return self.var(VarId.y1(i, j, k))

    def y2(self, i, j, k, l):
        return self.var(VarId.y2(i, j, k, l))

    def A(self, i, j, k, sym=False):
        return self.var(VarId.A(i, j, k, sym))

    def A1(self, i, j, k, l, sym=False):
        return self.var(VarId.A1(i, j, k, l, sym))


@lru_cache(maxsize=None)
def get_ring(n: int) -> Ring:
    return Ring(n)


def _fmpq(c) -> flint.fmpq:
    c = Fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


def _frac(q) -> Fraction:
    return Fraction(int(q.p), int(q.q))


# ---------------------------------------------------------------------------
# Rational expressions


class RationalExpr:
    """Reduced quotient of two polynomials, denominator monic.

    Instances are immutable.  Arithmetic with ``int``/``Fraction`` operands
    is supported.
    """

    __slots__ = ("ring", "num", "den")

    def __init__(self, ring: Ring, num, den):
        # trusted constructor: caller guarantees the canonical invariants
        self.ring = ring
        self.num = num
        self.den = den

    # -- predicates ----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise SymExprError("expression is not constant")
        if self.num.is_zero():
            return Fraction(0)
        return _frac(self.num.coefficient(0)) / _frac(self.den.coefficient(0))

    def variables(self) -> set[VarId]:
        vs = self.ring.vars
        used = set()
        for p in (self.num, self.den):
            degs = p.degrees()
            used.update(vs[i] for i, d in enumerate(degs) if d > 0)
        return used

    def depends_on(self, v: VarId) -> bool:
        i = self.ring.index[v]
        return self.num.degrees()[i] > 0 or self.den.degrees()[i] > 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalExpr):
            try:
                other = self.ring.const(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.ring is other.ring and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.ring.n, str(self.num), str(self.den)))

    # -- arithmetic (Henrici reductions) ------------------------------------
    def __add__(self, other) -> "RationalExpr":
        try:
            other = self.ring.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return _add(self, other)

    __radd__ = __add__

    def __neg__(self) -> "RationalExpr":
        return RationalExpr(self.ring, -self.num, self.den)

    def __pos__(self) -> "RationalExpr":
        return self

    def __sub__(self, other) -> "RationalExpr":
        try:
            other = self.ring.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return _add(self, -other)

    def __rsub__(self, other) -> "RationalExpr":
        return self.ring.coerce(other) - self

    def __mul__(self, other) -> "RationalExpr":
        if isinstance(other, RationalExpr):
            if other.ring is not self.ring:
                raise SymExprError("expressions from different rings")
            return _mul(self, other)
        try:
            c = _fmpq(other)
        except (TypeError, ValueError):
            return NotImplemented
        if c == 0:
            return self.ring.zero
        return RationalExpr(self.ring, self.num * c, self.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalExpr":
        try:
            other = self.ring.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return _mul(self, other.inverse())

    def __rtruediv__(self, other) -> "RationalExpr":
        return self.ring.coerce(other) / self

    def inverse(self) -> "RationalExpr":
        if self.num.is_zero():
            raise SymExprError("division by zero polynomial")
        lc = self.num.leading_coefficient()
        return RationalExpr(self.ring, self.den / lc, self.num / lc)

    def __pow__(self, k: int) -> "RationalExpr":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return RationalExpr(self.ring, self.num**k, self.den**k)

    # -- calculus / evaluation -----------------------------------------------
    def diff(self, v: VarId) -> "RationalExpr":
        return diff(self, v)

    def subs(self, bindings: Mapping[VarId, object]) -> "RationalExpr":
        return substitute(self, bindings)

    def evaluate(self, point: Mapping[VarId, object]) -> Fraction:
        """Exact value at a rational point (all occurring variables bound)."""
        vals = _point_values(self.ring, point, self.variables())
        d = self.den(*vals)
        if d == 0:
            raise SymExprError("evaluation at a pole")
        return _frac(self.num(*vals)) / _frac(d)

    def evaluate_vector(self, vals: list) -> Fraction:
        """Value at a full ``fmpq`` vector in ring variable order (see point_vector)."""
        d = self.den(*vals)
        if d == 0:
            raise SymExprError("evaluation at a pole")
        return _frac(self.num(*vals)) / _frac(d)

    # -- display -------------------------------------------------------------
    def __str__(self) -> str:
        return to_prefix(self)

    def __repr__(self) -> str:
        return f"RationalExpr({to_prefix(self)})"

    def num_terms(self) -> int:
        return len(self.num) + len(self.den)


def _reduced(ring: Ring, num, den) -> RationalExpr:
    """Reduce num/den by their gcd and make den monic."""
    if den.is_zero():
        raise SymExprError("division by zero polynomial")
    if num.is_zero():
        return ring.zero
    if not den.is_constant():
        g = num.gcd(den)
        if not g.is_one():
            num = num / g
            den = den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num = num / lc
        den = den / lc
    return RationalExpr(ring, num, den)


def _add(a: RationalExpr, b: RationalExpr) -> RationalExpr:
    ring = a.ring
    if b.ring is not ring:
        raise SymExprError("expressions from different rings")
    if a.num.is_zero():
        return b
    if b.num.is_zero():
        return a
    if a.den == b.den:
        if a.den.is_one():
            return RationalExpr(ring, a.num + b.num, a.den)
        return _reduced(ring, a.num + b.num, a.den)
    g = a.den.gcd(b.den)
    if g.is_one():
        num = a.num * b.den + b.num * a.den
        if num.is_zero():
            return ring.zero
        return RationalExpr(ring, num, a.den * b.den)
    ad = a.den / g
    bd = b.den / g
    num = a.num * bd + b.num * ad
    if num.is_zero():
        return ring.zero
    den = ad * b.den
    h = num.gcd(g)
    if not h.is_one():
        num = num / h
        den = den / h
    return RationalExpr(ring, num, den)


def _mul(a: RationalExpr, b: RationalExpr) -> RationalExpr:
    ring = a.ring
    if a.num.is_zero() or b.num.is_zero():
        return ring.zero
    an, ad, bn, bd = a.num, a.den, b.num, b.den
    if not bd.is_one():
        g = an.gcd(bd)
        if not g.is_one():
            an, bd = an / g, bd / g
    if not ad.is_one():
        g = bn.gcd(ad)
        if not g.is_one():
            bn, ad = bn / g, ad / g
    return RationalExpr(ring, an * bn, ad * bd)


# ---------------------------------------------------------------------------
# Module-level operations


def normalize(num, den, ring: Ring | None = None) -> RationalExpr:
    """Canonical reduced form of ``num/den``.

    ``num`` and ``den`` may be polynomial :class:`RationalExpr` values (or raw
    ``fmpq_mpoly`` with ``ring`` given).
    """
    if isinstance(num, RationalExpr) or isinstance(den, RationalExpr):
        ring = num.ring if isinstance(num, RationalExpr) else den.ring
        num, den = ring.coerce(num), ring.coerce(den)
        if not (num.is_polynomial() and den.is_polynomial()):
            raise SymExprError("normalize expects polynomial arguments")
        num, den = num.num, den.num
    if ring is None:
        raise SymExprError("ring required for raw polynomials")
    return _reduced(ring, num, den)


def diff(e: RationalExpr, v: VarId) -> RationalExpr:
    """Formal partial derivative (quotient rule), canonical."""
    ring = e.ring
    i = ring.index[v]
    if e.num.is_zero():
        return ring.zero
    dn = e.num.derivative(i)
    if e.den.is_constant():
        if dn.is_zero():
            return ring.zero
        return RationalExpr(ring, dn, e.den)
    dd = e.den.derivative(i)
    if dd.is_zero():
        if dn.is_zero():
            return ring.zero
        return _reduced(ring, dn, e.den)
    # d(n/d) = (n'd - n d')/d^2; divide d' and d by g = gcd(d, d') first
    g = e.den.gcd(dd)
    dq = e.den / g
    num = dn * dq - e.num * (dd / g)
    return _reduced(ring, num, dq * e.den)


def _split_by_degree(p, idxs: list[int]) -> dict[int, object]:
    """Split a polynomial into parts homogeneous in the variables ``idxs``."""
    parts: dict[int, dict] = {}
    for monom, coeff in p.terms():
        k = sum(monom[i] for i in idxs)
        parts.setdefault(k, {})[monom] = coeff
    ctx = p.context()
    return {k: ctx.from_dict(d) for k, d in parts.items()}


def _subs_poly(p, args, idxs, D, ctx):
    """Return (P, K) with p(args/D) = P / D**K."""
    if D.is_one():
        return p.compose(*args), 0
    parts = _split_by_degree(p, idxs)
    K = max(parts)
    total = ctx.from_dict({})
    Dpow = {0: ctx.constant(1)}
    for k, pk in parts.items():
        e = K - k
        if e not in Dpow:
            Dpow[e] = D**e
        total += pk.compose(*args) * Dpow[e]
    return total, K


def substitute(e: RationalExpr, bindings: Mapping[VarId, object]) -> RationalExpr:
    """Simultaneous substitution of variables by expressions."""
    ring = e.ring
    present = e.variables()
    active = {v: ring.coerce(b) for v, b in bindings.items() if v in present}
    if not active:
        return e
    ctx = ring.ctx
    D = ctx.constant(1)
    for b in active.values():
        if not b.den.is_one() and not b.den == D:
            g = D.gcd(b.den)
            D = D * (b.den / g)
    args = list(ring._gens)
    idxs = []
    for v, b in active.items():
        i = ring.index[v]
        idxs.append(i)
        args[i] = b.num * (D / b.den) if not b.den.is_one() else b.num * D
    pn, kn = _subs_poly(e.num, args, idxs, D, ctx)
    pd, kd = _subs_poly(e.den, args, idxs, D, ctx)
    if pd.is_zero():
        raise SymExprError("pole under substitution")
    if kd > kn:
        pn = pn * D ** (kd - kn)
    elif kn > kd:
        pd = pd * D ** (kn - kd)
    return _reduced(ring, pn, pd)


def _point_values(ring: Ring, point: Mapping[VarId, object], needed: Iterable[VarId]):
    vals = [flint.fmpq(0)] * len(ring.vars)
    for v in needed:
        if v not in point:
            raise SymExprError(f"no value for {v.name}")
    for v, c in point.items():
        if v in ring.index:
            vals[ring.index[v]] = _fmpq(c)
    return vals


def point_vector(ring: Ring, point: Mapping[VarId, object]) -> list:
    """Values of ``point`` laid out in ring variable order (unbound ones 0)."""
    return _point_values(ring, point, ())


def random_point(
    variables: Iterable[VarId],
    rng: random.Random,
    coeff_bound: int = 1000,
) -> dict[VarId, Fraction]:
    """Rationals with numerator in [-B, B] and denominator in [1, B]."""
    B = coeff_bound
    return {v: Fraction(rng.randint(-B, B), rng.randint(1, B)) for v in sorted(variables)}


@dataclass
class Verdict:
    zero: bool
    mode: str
    trials: int = 0
    witness: dict | None = None
    value: Fraction | None = None

    def __bool__(self) -> bool:
        return self.zero

    def to_json(self) -> dict:
        out: dict = {"zero": self.zero, "mode": self.mode}
        if self.mode == "randomized":
            out["trials"] = self.trials
        if self.witness is not None:
            out["witness"] = {v.name: str(c) for v, c in sorted(self.witness.items())}
            out["value"] = str(self.value)
        return out


def identity_check(
    e: RationalExpr,
    mode: str = "symbolic",
    trials: int = 20,
    seed: int = 0,
    coeff_bound: int = 1000,
    accept: Callable[[dict], bool] | None = None,
    max_resample: int = 200,
) -> Verdict:
    """Decide whether ``e`` is identically zero.

    ``symbolic``: exact, from the canonical numerator.  ``randomized``:
    evaluation at ``trials`` random rational points; a nonzero value gives a
    witness, all zeros is a probabilistic "zero" verdict.  Points where the
    denominator vanishes (or that ``accept`` rejects) are resampled.
    """
    if mode == "symbolic":
        if e.is_zero():
            return Verdict(True, mode)
        pt, val = _find_witness(e, random.Random(seed), coeff_bound, accept, max_resample)
        return Verdict(False, mode, witness=pt, value=val)
    if mode != "randomized":
        raise ValueError(f"unknown mode {mode!r}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    variables = sorted(e.variables())
    ring = e.ring
    for _ in range(trials):
        pt, vals = _sample_off_poles(e, variables, rng, coeff_bound, accept, max_resample)
        val = _frac(e.num(*vals))
        if val != 0:
            return Verdict(False, mode, trials, witness=pt, value=val / _frac(e.den(*vals)))
    return Verdict(True, mode, trials)


@dataclass(frozen=True)
class CheckOptions:
    """How identity checks are decided.  ``salt`` strings derive per-check
    seeds so that independent checks draw independent points."""

    mode: str = "symbolic"
    trials: int = 20
    seed: int = 0
    coeff_bound: int = 1000

    def __post_init__(self):
        if self.mode not in ("symbolic", "randomized"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.coeff_bound < 2:
            raise ValueError("coeff_bound must be >= 2")

    def seed_for(self, salt: str) -> int:
        h = hashlib.sha256(f"{self.seed}:{salt}".encode()).digest()
        return int.from_bytes(h[:8], "big")

    def rng(self, salt: str) -> random.Random:
        return random.Random(self.seed_for(salt))

    def check(self, e: "RationalExpr", salt: str = "", accept=None) -> Verdict:
        return identity_check(
            e, self.mode, self.trials, self.seed_for(salt), self.coeff_bound, accept=accept
        )


def _sample_off_poles(e, variables, rng, coeff_bound, accept, max_resample):
    ring = e.ring
    for _ in range(max_resample):
        pt = random_point(variables, rng, coeff_bound)
        if accept is not None and not accept(pt):
            continue
        vals = _point_values(ring, pt, ())
        if e.den(*vals) != 0:
            return pt, vals
    raise DegenerateSamplingError("degenerate sampling domain")


def _find_witness(e, rng, coeff_bound, accept, max_resample):
    variables = sorted(e.variables())
    for _ in range(max_resample):
        pt, vals = _sample_off_poles(e, variables, rng, coeff_bound, accept, max_resample)
        val = _frac(e.num(*vals))
        if val != 0:
            return pt, val / _frac(e.den(*vals))
    raise DegenerateSamplingError("degenerate sampling domain")


# ---------------------------------------------------------------------------
# Serialization


def _poly_terms(ring: Ring, p) -> list[tuple[Fraction, list[tuple[VarId, int]]]]:
    out = []
    for monom, c in p.terms():
        factors = [(ring.vars[i], d) for i, d in enumerate(monom) if d]
        out.append((_frac(c), factors))
    return out


def _poly_prefix(ring: Ring, p) -> str:
    terms = []
    for c, factors in _poly_terms(ring, p):
        fs = [v.name if d == 1 else f"(^ {v.name} {d})" for v, d in factors]
        if not fs:
            terms.append(str(c))
            continue
        body = fs[0] if len(fs) == 1 else "(* " + " ".join(fs) + ")"
        if c == 1:
            terms.append(body)
        elif c == -1:
            terms.append(f"(neg {body})")
        else:
            terms.append("(* " + " ".join([str(c)] + fs) + ")")
    if not terms:
        return "0"
    if len(terms) == 1:
        return terms[0]
    return "(+ " + " ".join(terms) + ")"


def to_prefix(e: RationalExpr) -> str:
    """Parenthesized prefix text of the canonical form."""
    num = _poly_prefix(e.ring, e.num)
    if e.den.is_one():
        return num
    return f"(/ {num} {_poly_prefix(e.ring, e.den)})"


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _parse_sexpr(text: str):
    tokens = _TOKEN.findall(text)
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of expression")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(read())
            if pos >= len(tokens):
                raise ValueError("unbalanced parentheses")
            pos += 1
            return items
        if tok == ")":
            raise ValueError("unexpected ')'")
        return tok

    tree = read()
    if pos != len(tokens):
        raise ValueError("trailing tokens")
    return tree


_NUM_RE = re.compile(r"^-?\d+(/\d+)?$")


def _apply(ring: Ring, op: str, args: list[RationalExpr]) -> RationalExpr:
    if op == "+":
        out = ring.zero
        for a in args:
            out = out + a
        return out
    if op == "*":
        out = ring.one
        for a in args:
            out = out * a
        return out
    if op == "neg" and len(args) == 1:
        return -args[0]
    if op == "-":
        if len(args) == 1:
            return -args[0]
        out = args[0]
        for a in args[1:]:
            out = out - a
        return out
    if op == "/" and len(args) == 2:
        return args[0] / args[1]
    if op == "^" and len(args) == 2:
        k = args[1].constant_value()
        if k.denominator != 1:
            raise ValueError("non-integer exponent")
        return args[0] ** int(k)
    raise ValueError(f"bad operator {op!r} with {len(args)} arguments")


def _atom(ring: Ring, tok: str) -> RationalExpr:
    if _NUM_RE.match(tok):
        return ring.const(Fraction(tok))
    return ring.var(parse_var_name(tok))


def from_prefix(ring: Ring, text: str) -> RationalExpr:
    def ev(node):
        if isinstance(node, str):
            return _atom(ring, node)
        if not node or not isinstance(node[0], str):
            raise ValueError("empty or malformed application")
        return _apply(ring, node[0], [ev(a) for a in node[1:]])

    return ev(_parse_sexpr(text))


def _poly_ast(ring: Ring, p) -> dict:
    terms = []
    for c, factors in _poly_terms(ring, p):
        fs = [{"var": v.name} if d == 1 else {"op": "^", "args": [{"var": v.name}, {"num": str(d)}]} for v, d in factors]
        if not fs:
            terms.append({"num": str(c)})
            continue
        if c != 1:
            fs.insert(0, {"num": str(c)})
        terms.append(fs[0] if len(fs) == 1 else {"op": "*", "args": fs})
    if not terms:
        return {"num": "0"}
    if len(terms) == 1:
        return terms[0]
    return {"op": "+", "args": terms}


def to_json_ast(e: RationalExpr) -> dict:
    num = _poly_ast(e.ring, e.num)
    if e.den.is_one():
        return num
    return {"op": "/", "args": [num, _poly_ast(e.ring, e.den)]}


def from_json_ast(ring: Ring, node) -> RationalExpr:
    if isinstance(node, str):
        node = json.loads(node)
    if "num" in node:
        return ring.const(Fraction(node["num"]))
    if "var" in node:
        return ring.var(parse_var_name(node["var"]))
    return _apply(ring, node["op"], [from_json_ast(ring, a) for a in node["args"]])
