"""Check suites run by the command-line harness.

Each suite is a function ``suite(ctx) -> None`` that records checks through
``ctx.record``.  A check is a callable returning ``(ok, detail)``; exceptions
become failed records carrying the error text (and residuals when present).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from . import connections as cn
from . import invariance as inv
from . import lagrangians as lg
from . import lifts
from . import secondorder as so
from .charts import ChartSpec, chart_dims, metric_det
from .linalg import InconsistentSystemError, rank
from .symexpr import CheckOptions, RationalExpr, VarId, get_ring, substitute, to_prefix

SUITES = ("prop1", "th1", "th2", "zeta", "retract", "palatini", "eh", "f-family", "legendre")
FAULTS = ("cm-perturb", "cc-nonsymmetric", "gamma2-perturb", "eh-cubic", "palatini-sign")


@dataclass
class Record:
    id: str
    anchor: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {"id": self.id, "anchor": self.anchor, "verdict": "pass" if self.passed else "fail", "detail": self.detail}


@dataclass
class Context:
    suite: str
    n: int
    signature: tuple
    opts: CheckOptions
    records: list = field(default_factory=list)

    def rng(self, name: str):
        return self.opts.rng(f"{self.suite}:{name}")

    def record(self, cid: str, anchor: str, fn) -> bool:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except InconsistentSystemError as exc:
            ok, detail = False, {"error": str(exc), "residuals": [to_prefix(r) for r in exc.residuals[:10]]}
        except Exception as exc:  # reported, not raised: one bad check must not hide the rest
            ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
        self.records.append(Record(f"{self.suite}:{cid}", anchor, bool(ok), detail or {}, time.perf_counter() - t0))
        return ok

    def point(self, chart: ChartSpec, rng):
        return inv.random_generic_point(chart, rng, self.opts.coeff_bound, self.signature)


def _first_failure(checks: dict, opts: CheckOptions, salt: str):
    """Check every named residual; return (all_zero, detail of first failure)."""
    for name, e in checks.items():
        v = opts.check(e, f"{salt}:{name}")
        if not v.zero:
            return False, {"checked": len(checks), "failed": str(name), "residual": to_prefix(e), **v.to_json()}
    return True, {"checked": len(checks), "mode": opts.mode}


def _variants(n):
    # the full-bundle (C_C) system is only solvable for n = 2 (see th2 suite)
    return ("full", "sym") if n == 2 else ("sym",)


# ---------------------------------------------------------------------------


def suite_prop1(ctx: Context) -> None:
    n, opts = ctx.n, ctx.opts
    expected = inv.expected_generator_count(n)

    def count():
        got = {v: len(inv.generators(n, v)) for v in ("full", "sym")}
        return all(g == expected for g in got.values()), {"expected": expected, **got}

    ctx.record("count", "generator count n*C(n+3,3)", count)

    def rank_at_points():
        rng = ctx.rng("rank")
        out = {}
        for v in ("full", "sym"):
            gs = inv.generators(n, v)
            out[v] = [inv.distribution_rank(gs, ctx.point(gs.chart, rng)) for _ in range(5)]
        return all(r == expected for rs in out.values() for r in rs), {"expected": expected, "ranks": out}

    ctx.record("rank", "distribution rank n*C(n+3,3) at generic points", rank_at_points)

    def invariants():
        gs = inv.generators(n, "full")
        total = chart_dims(gs.chart).total
        r = inv.generic_rank(gs, ctx.rng("count"), opts.coeff_bound)
        want = inv.invariant_count(n)
        return total - r == want, {"dim": total, "rank": r, "dim-rank": total - r, "expected": want}

    ctx.record("invariant-count", "number of invariants (5n^4+3n^3-5n^2+3n)/6", invariants)

    def transcription_vs_lift():
        rng = ctx.rng("transcription")
        R = get_ring(n)
        for v in ("full", "sym"):
            gs = inv.generators(n, v)
            pt = ctx.point(gs.chart, rng)
            for i in range(1, n + 1):
                pt[VarId.x(i)] = Fraction(0)
            G = inv.generator_matrix(gs, pt)
            Lm = [lifts.lift_product(u, symmetric=v == "sym").values_at(pt) for u in lifts.monomial_fields(n, 3)]
            rg, rl, rb = rank(G), rank(Lm), rank(G + Lm)
            if not rg == rl == rb:
                return False, {"variant": v, "rank_generators": rg, "rank_lifts": rl, "rank_both": rb}
        return True, {"variants": ["full", "sym"]}

    ctx.record("transcription-vs-lift", "generators are the u-jet coefficients of the lift", transcription_vs_lift)

    def prolong_agreement():
        rng = ctx.rng("prolong")
        for _ in range(3):
            u = lifts.random_base_field(n, rng, 3)
            if lifts.prolong(lifts.lift_metric(u), 1) != lifts.lift_metric_prolonged(u):
                return False, {"field": repr(u), "part": "metric"}
            for sym in (False, True):
                P = lifts.prolong(lifts.lift_connection(u, symmetric=sym), 1)
                Q = lifts.lift_product(u, symmetric=sym)
                for var, c in P.components.items():
                    if Q[var] != c:
                        return False, {"field": repr(u), "coordinate": var.name}
        return True, {"fields": 3}

    ctx.record("prolong-vs-closed-form", "generic prolongation equals the closed-form lift", prolong_agreement)

    def involutive():
        rng = ctx.rng("involutive")
        gs = inv.generators(n, "full")
        pts = [ctx.point(gs.chart, rng) for _ in range(3)]
        for _ in range(10):
            a, b = rng.sample(gs.generators, 2)
            for p in pts:
                if not inv.bracket_in_span(gs, a, b, p):
                    return False, {"pair": [a.label, b.label]}
        return True, {"pairs": 10, "points": 3}

    ctx.record("involutive", "generator distribution is involutive", involutive)

    def homomorphism():
        rng = ctx.rng("homomorphism")
        for k in range(5):
            u = lifts.random_base_field(n, rng, 2)
            w = lifts.random_base_field(n, rng, 2)
            lhs = lifts.lift_product(u).bracket(lifts.lift_product(w))
            rhs = lifts.lift_product(u.bracket(w))
            if lhs != rhs:
                bad = next(v for v in set(lhs.components) | set(rhs.components) if lhs[v] != rhs[v])
                return False, {"pair": k, "coordinate": bad.name}
        return True, {"pairs": 5}

    ctx.record("homomorphism", "lifting is a Lie algebra homomorphism", homomorphism)

    def volume():
        rng = ctx.rng("volume")
        det = metric_det(n)
        for _ in range(3):
            u = lifts.random_base_field(n, rng, 2)
            div = get_ring(n).zero
            for i in range(1, n + 1):
                div = div + u.du(i, i)
            res = lifts.lift_metric(u).apply(det) + 2 * div * det
            if not res.is_zero():
                return False, {"residual": to_prefix(res)}
        return True, {"fields": 3}

    ctx.record("volume", "X_M(det y) = -2 div(u) det y", volume)

    def palatini_invariant():
        r = inv.is_invariant(lg.palatini(n).expr, ChartSpec(n, "J1MxCsym"), opts)
        return r.invariant, r.to_json()

    ctx.record("palatini-invariant", "L_P is invariant", palatini_invariant)

    if n <= 3:

        def eh_invariant():
            r = inv.is_invariant(lg.einstein_hilbert(n).expr, ChartSpec(n, "J2M"), opts)
            return r.invariant, r.to_json()

        ctx.record("eh-invariant", "L_EH is invariant", eh_invariant)

    def degree_bound():
        ok, bad = inv.degree_bound_check(ChartSpec(n, "J2M"))
        return ok, {"offending": bad[:5]}

    ctx.record("j2m-degree-bound", "degree-4 monomials add no condition on J^2M", degree_bound)

    def y11_witness():
        r = inv.is_invariant(get_ring(n).y(1, 1), ChartSpec(n, "J1MxC"), opts, stop_at_first=True)
        return (not r.invariant and r.failures[0] == "X^1_1"), {"first_failure": r.failures[:1]}

    ctx.record("non-invariant-witness", "coordinate functions are not invariant", y11_witness)

    def equivalence():
        rng = ctx.rng("equivalence")
        chart = ChartSpec(n, "J1MxCsym")
        P = lg.palatini(n).expr
        R = get_ring(n)
        corpus = []
        for k in range(10):
            coeffs = [rng.randint(-4, 4) for _ in range(rng.randint(1, 3))] + [rng.choice((-2, -1, 1, 3))]
            corpus.append((f"f{k}(L_P)", lg.poly_eval(coeffs, P), True))
        fibre = [v for v in chart.coordinates() if v.kind != "x"]
        for k in range(10):
            e = P * rng.randint(1, 3) + rng.randint(1, 5) * R.var(rng.choice(fibre))
            corpus.append((f"L_P + noise{k}", e, False))
        for name, e, want in corpus:
            a = inv.is_invariant(e, chart, opts, "generators", stop_at_first=True).invariant
            b = inv.is_invariant(e, chart, opts, "monomials", stop_at_first=True).invariant
            if a != b or a != want:
                return False, {"lagrangian": name, "generators": a, "monomials": b, "expected": want}
        return True, {"lagrangians": len(corpus)}

    if n == 2:
        ctx.record("notion-equivalence", "generator test agrees with lifts of all monomial fields", equivalence)


def _th1_lagrangians(n, variant):
    if variant == "sym":
        P = lg.palatini(n).expr
        return {"L_P": P, "L_P^2": P * P, "L_P+7": P + 7}
    Ric = lg.ricci_scalar_general(n).expr
    Tsq = lg.torsion_square(n).expr
    return {"Ric": Ric, "Ric^2": Ric * Ric, "Ric+7": Ric + 7, "T^2": Tsq, "Ric*T^2-3": Ric * Tsq - 3}


def suite_th1(ctx: Context) -> None:
    n, opts = ctx.n, ctx.opts
    for variant in _variants(n):
        c = cn.canonical_connection(n, variant)
        gs = inv.generators(n, variant)

        def conditions(c=c):
            rep = cn.check_conditions(c, opts)
            return rep.ok, rep.to_json()

        ctx.record(f"conditions-{variant}", "(C_M) and (C_C) hold for the canonical connection", conditions)

        def ham_invariant(c=c, gs=gs, variant=variant):
            checks = {}
            for name, L in _th1_lagrangians(n, variant).items():
                H = cn.covariant_hamiltonian1(L, c)
                for g in gs:
                    checks[f"{g.label}({name}^gamma)"] = g.apply(H)
            return _first_failure(checks, opts, "th1")

        ctx.record(f"hamiltonian-invariant-{variant}", "L invariant implies L^gamma invariant", ham_invariant)

        def membership(c=c, gs=gs, variant=variant):
            rng = ctx.rng(f"membership-{variant}")
            pts = [ctx.point(gs.chart, rng) for _ in range(5)]
            spans = inv.generator_spans(gs, pts)
            for g in gs:
                ok, flags = cn.bracket_membership(g, c, pts, gs, spans)
                if not ok:
                    return False, {"generator": g.label, "points": flags}
            return True, {"generators": len(gs), "points": 5}

        ctx.record(f"bracket-membership-{variant}", "[g, D^gamma] lies in the generator distribution", membership)

        def special_brackets(c=c, gs=gs):
            D = c.D()
            x = gs.by_label("X^1")
            top = gs.generators[-1]
            ok = x.bracket(D).is_zero() and top.bracket(D) == top
            return ok, {"translation": "X^1", "top": top.label}

        ctx.record(f"special-brackets-{variant}", "[X^h, D^gamma] = 0 and [X^cda_b, D^gamma] = X^cda_b", special_brackets)

    c = cn.canonical_connection(n, "sym")
    P = lg.palatini(n).expr

    def derivation():
        rng = ctx.rng("derivation")
        D = c.D()
        R = get_ring(n)
        jets = [R.var(v) for v in c.jet_chart.coordinates() if v.kind in ("y1", "A1")]
        for _ in range(3):
            a = P + rng.randint(1, 9) * rng.choice(jets)
            b = rng.choice(jets) * rng.choice(jets) - rng.randint(1, 9)
            res = D.apply(a * b) - a * D.apply(b) - b * D.apply(a)
            if not res.is_zero():
                return False, {"residual": to_prefix(res)}
        return True, {"pairs": 3}

    ctx.record("derivation", "D^gamma is a derivation", derivation)

    def euler():
        rng = ctx.rng("euler")
        R = get_ring(n)
        L = P + R.A1(1, 1, 1, 2, True) * R.y(1, 2) + rng.randint(1, 9)
        lhs = cn.covariant_hamiltonian1(L * L, c)
        rhs = 2 * L * c.D().apply(L) - L * L
        return _first_failure({"H(L^2) - (2 L D(L) - L^2)": lhs - rhs}, opts, "euler")

    ctx.record("euler-square", "L^2 Hamiltonian equals 2 L D^gamma(L) - L^2", euler)


def suite_th2(ctx: Context) -> None:
    n, opts = ctx.n, ctx.opts
    for variant in _variants(n):
        sym = variant == "sym"
        c = cn.canonical_connection(n, variant)

        def two_solutions(c=c, variant=variant, sym=sym):
            other = cn.gamma_C_solution(n, variant, "first")
            d = {k: c.gamma_C[k] - other[k] for k in c.gamma_C}
            bad = cn.symmetric_part_check(d, n, sym, opts)
            nontrivial = any(not e.is_zero() for e in d.values())
            return (not bad and nontrivial), {"nonzero_difference": nontrivial, "asymmetric": [b[0] for b in bad[:3]]}

        ctx.record(f"difference-symmetric-{variant}", "two (C_C) solutions differ by a totally symmetric tensor", two_solutions)

        def perturbed(c=c, variant=variant):
            t = cn.random_symmetric_difference(n, ctx.rng(f"perturb-{variant}"), variant)
            rep = cn.check_conditions(cn.add_symmetric_difference(c, t), opts)
            return rep.ok, rep.to_json()

        ctx.record(f"perturbation-{variant}", "adding a totally symmetric tensor preserves (C_C)", perturbed)

    def zero_at_flat():
        for variant in _variants(n):
            R = get_ring(n)
            zero = {v: R.zero for v in ChartSpec(n, "C" if variant == "full" else "Csym").coordinates() if v.kind == "A"}
            if any(not substitute(e, zero).is_zero() for e in cn.gamma_C_particular(n, variant).values()):
                return False, {"variant": variant}
        return True, {}

    ctx.record("zero-at-A0", "particular solution vanishes at A = 0", zero_at_flat)

    def full_bundle():
        if n == 2:
            cn.gamma_C_particular(2, "full")
            return True, {"finding": "no orbit with three distinct indices; the full system is solvable"}
        checks = {}
        obstructed = False
        for h in range(1, n + 1):
            for abc in [(a, b, c) for a in range(1, n + 1) for b in range(a + 1, n + 1) for c in range(b + 1, n + 1)]:
                hx = cn.hexagon_residual(n, h, abc)
                checks[f"h={h} {abc}"] = hx - cn.torsion_cyclic_sum(n, h, abc)
                obstructed = obstructed or not hx.is_zero()
        ok, detail = _first_failure(checks, opts, "hexagon")
        try:
            cn.gamma_C_particular(n, "full")
            raised = False
        except InconsistentSystemError:
            raised = True
        detail.update(
            finding="on the full bundle (C_C) forces sum_cyc T(T(a,b),c) = 0; solvable only where that torsion term vanishes",
            obstruction_nonzero=obstructed,
            solver_reports_inconsistency=raised,
        )
        return ok and obstructed and raised, detail

    ctx.record("full-bundle-compatibility", "(C_C) compatibility around an S_3 orbit equals the torsion cyclic sum", full_bundle)


def suite_zeta(ctx: Context) -> None:
    n, opts = ctx.n, ctx.opts

    def roundtrip():
        return _first_failure(so.roundtrip_residuals(n), opts, "zeta")

    ctx.record("roundtrip", "zeta and its inverse compose to the identity", roundtrip)

    def symmetric():
        r = range(1, n + 1)
        ok = all(so.christoffel(n, h, i, j) == so.christoffel(n, h, j, i) for h in r for i in r for j in r)
        return ok, {}

    ctx.record("symmetric", "Christoffel symbols are symmetric", symmetric)

    def metric_part():
        c2 = so.gamma2_from_gamma1(cn.canonical_connection(n, "sym"))
        return _first_failure({f"g_{a}{b}{r}": e for (a, b, r), e in so.gamma1_zeta_residuals(c2).items()}, opts, "metric-part")

    ctx.record("metric-part", "gamma_abr o zeta = -y_ab,r", metric_part)


def suite_retract(ctx: Context) -> None:
    n, opts = ctx.n, ctx.opts

    def retract():
        return _first_failure(so.kappa_zeta2_residuals(n), opts, "kappa")

    ctx.record("kappa-zeta2", "kappa o zeta^2 = id on J^2M", retract)

    def flat():
        R = get_ring(n)
        zero = {v: R.zero for v in ChartSpec(n, "J1MxCsym").coordinates() if v.kind in ("A", "A1")}
        ok = all(substitute(e, zero).is_zero() for e in so.kappa(n).values())
        return ok, {}

    ctx.record("flat-input", "kappa of a flat connection has zero derivatives", flat)


def suite_palatini(ctx: Context) -> None:
    n, opts = ctx.n, ctx.opts
    c = cn.canonical_connection(n, "sym")
    P = lg.palatini(n).expr

    def canonical():
        return _first_failure({"L_P^gamma": cn.covariant_hamiltonian1(P, c)}, opts, "pal")

    ctx.record("hamiltonian-zero", "L_P^gamma = 0", canonical)

    def perturbed():
        t = cn.random_symmetric_difference(n, ctx.rng("perturb"), "sym")
        cp = cn.add_symmetric_difference(c, t)
        return _first_failure({"L_P^gamma (perturbed)": cn.covariant_hamiltonian1(P, cp)}, opts, "palp")

    ctx.record("hamiltonian-zero-perturbed", "L_P^gamma = 0 for a perturbed (C_C) solution", perturbed)

    def sym_curvature():
        recs = cn.sym_curvature_residuals(c, opts)
        bad = [r for r in recs if not r.verdict.zero]
        return not bad, ({"failed": bad[0].to_json()} if bad else {"checked": len(recs)})

    ctx.record("sym-curvature", "(C_C) curvature equation in C^sym form", sym_curvature)

    def zero_test():
        v = lg.zero_hamiltonian_test(P, c, opts)
        return v.affine and v.reproducing and v.hamiltonian_zero, v.to_json()

    ctx.record("zero-hamiltonian-palatini", "L_P is affine in the jets and reproduced by D^gamma", zero_test)

    def corpus():
        for variant in _variants(n):
            cc = cn.canonical_connection(n, variant)
            for name, L, want in lg.zero_hamiltonian_corpus(cc, ctx.rng(f"corpus-{variant}")):
                v = lg.zero_hamiltonian_test(L, cc, opts)
                if not v.consistent or v.hamiltonian_zero != want:
                    return False, {"variant": variant, "lagrangian": name, "expected_zero": want, **v.to_json()}
        return True, {"lagrangians": 20, "variants": list(_variants(n))}

    ctx.record("zero-hamiltonian-equivalence", "L^gamma = 0 iff affine in the jets and reproduced by D^gamma", corpus)


def suite_eh(ctx: Context) -> None:
    n, opts = ctx.n, ctx.opts
    c = cn.canonical_connection(n, "sym")
    c2 = so.gamma2_from_gamma1(c)
    EH = lg.einstein_hilbert(n).expr

    ctx.record(
        "transcription-vs-curvature",
        "local expression of L_EH equals the scalar curvature",
        lambda: _first_failure({"L_EH - y^ij R_ij": EH - lg.einstein_hilbert_curvature(n).expr}, opts, "ehc"),
    )
    ctx.record(
        "palatini-pullback",
        "L_P o zeta^2 = L_EH",
        lambda: _first_failure({"L_P o zeta^2 - L_EH": so.pullback_zeta2(lg.palatini(n).expr) - EH}, opts, "pz"),
    )

    def affine():
        R = get_ring(n)
        jets2 = [v for v in ChartSpec(n, "J2M").coordinates() if v.kind == "y2"]
        checks = {}
        for v in jets2:
            d = EH.diff(v)
            for w in jets2:
                if not w < v:
                    checks[f"{v.name},{w.name}"] = d.diff(w)
        return _first_failure(checks, opts, "affine")

    ctx.record("affine-in-second-jets", "L_EH is linear in y_ab,ij", affine)

    def roundtrip():
        back = so.gamma1_from_gamma2(c2)
        return _first_failure({f"G^{k[0]}_{k[1]}{k[2]}{k[3]}": back[k] - c.gamma_C[k] for k in c.gamma_C}, opts, "g12")

    ctx.record("gamma-roundtrip", "gamma -> gamma^2 -> gamma is the identity", roundtrip)
    ctx.record(
        "equation-bis",
        "gamma^2 satisfies the second-order compatibility condition",
        lambda: _first_failure(so.second_order_condition_residuals(c2), opts, "bis"),
    )
    ctx.record(
        "hamiltonian-zero",
        "L_EH^{gamma^2} = 0",
        lambda: _first_failure({"L_EH^gamma2": so.covariant_hamiltonian2(EH, c2)}, opts, "eh0"),
    )

    def perturbed():
        t = cn.random_symmetric_difference(n, ctx.rng("perturb"), "sym")
        c2p = so.gamma2_from_gamma1(cn.add_symmetric_difference(c, t))
        return _first_failure({"L_EH^gamma2 (perturbed)": so.covariant_hamiltonian2(EH, c2p)}, opts, "ehp")

    ctx.record("hamiltonian-zero-perturbed", "L_EH^{gamma^2} = 0 for any (C_C) solution", perturbed)

    def key_identity():
        Lp = so.pullback_kappa(EH)
        lhs = so.covariant_hamiltonian2(EH, c2)
        rhs = so.pullback_zeta2(cn.covariant_hamiltonian1(Lp, c))
        return _first_failure({"L^gamma2 - (L')^gamma o zeta^2": lhs - rhs, "L - L' o zeta^2": EH - so.pullback_zeta2(Lp)}, opts, "key")

    ctx.record("key-identity", "L^{gamma^2} = (kappa^* L)^gamma o zeta^2", key_identity)

    if n == 2:

        def p2_invariance():
            chart = ChartSpec(n, "J2M")
            for name, L in (("L_EH", EH), ("L_EH^2", EH * EH), ("L_EH+5", EH + 5)):
                r = inv.is_invariant(so.covariant_hamiltonian2(L, c2), chart, opts, stop_at_first=True)
                if not r.invariant:
                    return False, {"lagrangian": name, **r.to_json()}
            return True, {"lagrangians": 3}

        ctx.record("p2-invariance", "L invariant implies L^{gamma^2} invariant", p2_invariance)


F_FAMILY = {"t^2": [0, 0, 1], "t^3": [0, 0, 0, 1], "t^3-2t": [0, -2, 0, 1], "5": [5]}
F_AFFINE = {"5": [5], "3t-1": [-1, 3]}


def suite_f_family(ctx: Context) -> None:
    n, opts = ctx.n, ctx.opts
    c2 = so.gamma2_from_gamma1(cn.canonical_connection(n, "sym"))
    EH = lg.einstein_hilbert(n)
    # powers of L_EH are too large to expand exactly beyond n = 2
    family = F_FAMILY if n == 2 else F_AFFINE
    for name, f in family.items():

        def one(f=f, name=name):
            fL = lg.compose_poly(EH, f).expr
            lhs = so.covariant_hamiltonian2(fL, c2)
            rhs = lg.poly_eval(lg.poly_derivative(f), EH.expr) * EH.expr - fL
            return _first_failure({f"f={name}": lhs - rhs}, opts, f"f:{name}")

        ctx.record(f"f={name}", "f(L_EH)^{gamma^2} = f'(L_EH) L_EH - f(L_EH)", one)


def suite_legendre(ctx: Context) -> None:
    n, opts = ctx.n, ctx.opts
    EH = lg.einstein_hilbert(n).expr
    data = so.legendre(EH, n)

    def projectable():
        return data.projectable, {"jet_dependent": [str(k) for k in data.jet_dependent()[:5]]}

    ctx.record("projectable", "L^{ij,kl} of L_EH depend only on y_ab", projectable)
    ctx.record(
        "consistency",
        "L^{ij,kl} = dL^i/dy_kl,j",
        lambda: _first_failure({str(k): e for k, e in so.legendre_consistency(data).items()}, opts, "leg"),
    )

    def general_form():
        gen = so.legendre_first_general(EH, n)
        return _first_failure({str(k): gen[k] - data.first[k] for k in data.first}, opts, "f12")

    ctx.record("general-f12", "the total-derivative form of L^{i,kl} agrees on L_EH", general_form)

    def summary():
        return True, {
            "H_terms": data.H.num_terms(),
            "momenta": len(data.momenta),
            "H_first_order": all(v.kind in ("y", "y1") for v in data.H.variables()),
        }

    ctx.record("momenta", "H and p_kl,i computed", summary)


# ---------------------------------------------------------------------------
# Injected faults: each must be detected (a failed record with a witness)


def _fault_record(ctx, cid, anchor, fn):
    def wrapped():
        detected, detail = fn()
        detail["injected_fault"] = cid
        # the record fails exactly when the fault is detected
        return (not detected), detail

    ctx.record(cid, anchor, wrapped)


def suite_faults(ctx: Context, which) -> None:
    n, opts = ctx.n, ctx.opts
    R = get_ring(n)
    c = cn.canonical_connection(n, "sym")

    if "cm-perturb" in which:

        def f():
            gM = dict(c.gamma_M)
            gM[(1, 2, 1)] = gM[(1, 2, 1)] + 1
            rep = cn.check_conditions(c.with_gamma_M(gM), opts)
            fails = rep.failures
            return bool(fails), {"failure": fails[0].to_json() if fails else None}

        _fault_record(ctx, "cm-perturb", "connections: g_121 + 1 violates (C_M)", f)

    if "cc-nonsymmetric" in which:

        def f():
            gC = dict(c.gamma_C)
            gC[(1, 1, 1, 2)] = gC[(1, 1, 1, 2)] + R.A(1, 1, 1, True)
            rep = cn.check_conditions(c.with_gamma_C(gC), opts)
            fails = rep.failures
            return bool(fails), {"failure": fails[0].to_json() if fails else None}

        _fault_record(ctx, "cc-nonsymmetric", "connections: a non-symmetric change violates (C_C)", f)

    if "gamma2-perturb" in which:

        def f():
            c2 = so.gamma2_from_gamma1(c)
            sec = dict(c2.second)
            sec[(1, 2, 1, 2)] = sec[(1, 2, 1, 2)] + R.y(1, 1)
            bad = c2.with_second(sec)
            ok1, d1 = _first_failure(so.second_order_condition_residuals(bad), opts, "fbis")
            ok2, d2 = _first_failure({"L_EH^gamma2": so.covariant_hamiltonian2(lg.einstein_hilbert(n).expr, bad)}, opts, "feh")
            return (not ok1 and not ok2), {"compatibility": d1, "hamiltonian": d2}

        _fault_record(ctx, "gamma2-perturb", "secondorder: perturbed gamma^2 breaks compatibility and L_EH^{gamma^2} = 0", f)

    if "eh-cubic" in which:

        def f():
            L = lg.einstein_hilbert(n).expr + R.y2(1, 1, 1, 1) ** 3
            data = so.legendre(L, n)
            bad = data.jet_dependent()
            detail = {"jet_dependent": [str(k) for k in bad[:3]]}
            if bad:
                i, j, k, l = bad[0]
                e = data.second[bad[0]]
                v = opts.check(e.diff(VarId.y2(1, 1, 1, 1)), "fault:eh-cubic")
                detail["derivative_witness"] = v.to_json()
            return bool(bad), detail

        _fault_record(ctx, "eh-cubic", "lagrangians: cubic second-derivative term breaks projectability", f)

    if "palatini-sign" in which:

        def f():
            A = lambda i, j, k: R.A(i, j, k, True)
            from .charts import inverse_metric

            yi = inverse_metric(n)
            flip = R.zero
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    for k in range(1, n + 1):
                        for m in range(1, n + 1):
                            flip = flip + yi(i, j) * A(m, i, k) * A(k, j, m)
            bad = lg.palatini(n).expr + 2 * flip  # sign of the last term flipped
            ok, d = _first_failure({"L^gamma": cn.covariant_hamiltonian1(bad, c)}, opts, "fpal")
            return not ok, d

        _fault_record(ctx, "palatini-sign", "lagrangians: sign error in L_P gives L^gamma != 0", f)


SUITE_FUNCS = {
    "prop1": suite_prop1,
    "th1": suite_th1,
    "th2": suite_th2,
    "zeta": suite_zeta,
    "retract": suite_retract,
    "palatini": suite_palatini,
    "eh": suite_eh,
    "f-family": suite_f_family,
    "legendre": suite_legendre,
}


def run_one(suite: str, n: int, signature, opts: CheckOptions, faults=()) -> list[Record]:
    ctx = Context(suite, n, tuple(signature), opts)
    if suite == "faults":
        suite_faults(ctx, set(faults))
    else:
        SUITE_FUNCS[suite](ctx)
    return ctx.records
