import random

import pytest

from jetcheck import invariance as inv
from jetcheck.charts import ChartSpec, chart_dims
from jetcheck.lagrangians import einstein_hilbert, palatini, ricci_scalar_general, torsion_square
from jetcheck.symexpr import CheckOptions, VarId, get_ring


@pytest.mark.parametrize("n,count", [(2, 20), (3, 60)])
@pytest.mark.parametrize("variant", ["full", "sym"])
def test_generator_count(n, count, variant):
    assert len(inv.generators(n, variant)) == count == inv.expected_generator_count(n)


def test_invariant_count_formula():
    assert inv.invariant_count(2) == 15
    assert inv.invariant_count(3) == 75


@pytest.mark.parametrize("n", [2, 3])
def test_generic_rank(n):
    gs = inv.generators(n, "full")
    assert inv.generic_rank(gs, random.Random(n)) == len(gs)
    assert chart_dims(gs.chart).total - len(gs) == inv.invariant_count(n)


def test_top_generator_has_constant_components():
    top = [g for g in inv.generators(2, "full") if len(g.label.split("_")[0]) == 5]
    assert len(top) == 8
    for g in top:
        for v, c in g.components.items():
            assert v.kind == "A1"
            assert c.is_constant()


def test_top_generators_are_six_term_symmetrizations():
    g = inv.generators(3, "full").by_label("X^123_1")
    assert len(g.components) == 6
    assert all(c == 1 for c in g.components.values())


def test_translation_generator():
    g = inv.generators(2, "full").by_label("X^1")
    assert g.components == {VarId.x(1): get_ring(2).one}


def test_palatini_invariant():
    r = inv.is_invariant(palatini(2).expr, ChartSpec(2, "J1MxCsym"))
    assert r.invariant
    assert r.method == "generators"


def test_coordinate_not_invariant_first_witness():
    r = inv.is_invariant(get_ring(2).y(1, 1), ChartSpec(2, "J1MxC"), stop_at_first=True)
    assert not r.invariant
    assert r.failures == ["X^1_1"]


def test_einstein_hilbert_invariant_by_lifts():
    assert inv.is_invariant(einstein_hilbert(2).expr, ChartSpec(2, "J2M")).invariant


@pytest.mark.parametrize("L", [ricci_scalar_general, torsion_square])
def test_full_bundle_invariants(L):
    assert inv.is_invariant(L(2).expr, ChartSpec(2, "J1MxC")).invariant


def test_palatini_not_invariant_on_full_bundle():
    # the display only makes sense for symmetric A; its full-bundle reading is not a scalar
    R = get_ring(2)
    e = palatini(2).expr
    full = {VarId.A(i, j, k, True): R.A(i, j, k) for i in (1, 2) for j in (1, 2) for k in (j, 2)}
    full.update({VarId.A1(i, j, k, l, True): R.A1(i, j, k, l) for i in (1, 2) for j in (1, 2) for k in (j, 2) for l in (1, 2)})
    assert not inv.is_invariant(e.subs(full), ChartSpec(2, "J1MxC"), stop_at_first=True).invariant


def test_methods_agree():
    chart = ChartSpec(2, "J1MxCsym")
    P = palatini(2).expr
    R = get_ring(2)
    for e, want in ((P * P + 3 * P, True), (P + R.A(1, 1, 2, True), False)):
        a = inv.is_invariant(e, chart, method="generators").invariant
        b = inv.is_invariant(e, chart, method="monomials").invariant
        assert a == b == want


def test_randomized_mode():
    opts = CheckOptions("randomized", trials=5, seed=1)
    assert inv.is_invariant(palatini(3).expr, ChartSpec(3, "J1MxCsym"), opts).invariant


def test_chart_mismatch_raises():
    with pytest.raises(ValueError):
        inv.is_invariant(get_ring(2).A(1, 1, 1), ChartSpec(2, "J2M"))


def test_degree_bound_on_j2m():
    ok, bad = inv.degree_bound_check(ChartSpec(2, "J2M"))
    assert ok, bad


def test_involutive_spot_check():
    rng = random.Random(11)
    gs = inv.generators(2, "full")
    pts = [inv.random_generic_point(gs.chart, rng) for _ in range(2)]
    for _ in range(5):
        a, b = rng.sample(gs.generators, 2)
        assert all(inv.bracket_in_span(gs, a, b, p) for p in pts)


def test_random_point_respects_signature():
    from jetcheck.charts import metric_point_ok

    rng = random.Random(2)
    chart = ChartSpec(2, "J1MxC", (1, 1))
    for _ in range(5):
        assert metric_point_ok(inv.random_generic_point(chart, rng), 2, (1, 1))
