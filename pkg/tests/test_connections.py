import random

import pytest

from jetcheck import connections as cn
from jetcheck.invariance import generators, random_generic_point
from jetcheck.lagrangians import palatini
from jetcheck.linalg import InconsistentSystemError
from jetcheck.symexpr import CheckOptions, VarId, get_ring, substitute

R = get_ring(2)


def y(i, j):
    return R.y(i, j)


def test_gamma_M_111():
    g = cn.gamma_M_cm(2)
    assert g[(1, 1, 1)] == -2 * (y(1, 1) * R.A(1, 1, 1) + y(1, 2) * R.A(2, 1, 1))


def test_gamma_M_121():
    g = cn.gamma_M_cm(2)
    expect = -(y(1, 2) * R.A(1, 1, 1) + y(2, 2) * R.A(2, 1, 1) + y(1, 1) * R.A(1, 1, 2) + y(1, 2) * R.A(2, 1, 2))
    assert g[(1, 2, 1)] == expect


@pytest.mark.parametrize("variant", ["full", "sym"])
def test_flat_connection_gives_zero(variant):
    c = cn.canonical_connection(2, variant)
    zero = {v: 0 for v in c.chart.coordinates() if v.kind == "A"}
    assert all(substitute(e, zero).is_zero() for e in c.gamma_M.values())
    assert all(substitute(e, zero).is_zero() for e in c.gamma_C.values())


@pytest.mark.parametrize("variant", ["full", "sym"])
def test_canonical_connection_n2(variant):
    rep = cn.check_conditions(cn.canonical_connection(2, variant))
    assert rep.ok, [r.name for r in rep.failures]


def test_canonical_connection_n3_sym_randomized():
    rep = cn.check_conditions(cn.canonical_connection(3, "sym"), CheckOptions("randomized", 20, 42))
    assert rep.ok


def test_full_system_inconsistent_at_n3():
    with pytest.raises(InconsistentSystemError) as exc:
        cn.gamma_C_particular(3, "full")
    assert exc.value.residuals


@pytest.mark.parametrize("h", [1, 2, 3])
@pytest.mark.parametrize("abc", [(1, 2, 3), (1, 1, 2), (2, 3, 3)])
def test_obstruction_is_torsion_cyclic_sum(h, abc):
    assert cn.hexagon_residual(3, h, abc) == cn.torsion_cyclic_sum(3, h, abc)


def test_obstruction_nonzero_for_distinct_indices():
    assert not cn.hexagon_residual(3, 1, (1, 2, 3)).is_zero()


def test_obstruction_vanishes_on_csym():
    assert cn.hexagon_residual(3, 1, (1, 2, 3), sym=True).is_zero()


def test_perturbed_metric_part_fails_with_name():
    c = cn.canonical_connection(2, "sym")
    gM = dict(c.gamma_M)
    gM[(1, 2, 1)] = gM[(1, 2, 1)] + 1
    rep = cn.check_conditions(c.with_gamma_M(gM))
    assert [r.name for r in rep.failures] == ["(C_M) g_121"]
    assert rep.failures[0].verdict.witness is not None


def test_nonsymmetric_change_breaks_cc():
    c = cn.canonical_connection(2, "full")
    gC = dict(c.gamma_C)
    gC[(1, 1, 1, 2)] = gC[(1, 1, 1, 2)] + R.A(2, 1, 2)
    rep = cn.check_conditions(c.with_gamma_C(gC))
    assert rep.failures
    assert all(r.name.startswith("(C_C)") for r in rep.failures)


@pytest.mark.parametrize("n,variant", [(2, "full"), (2, "sym"), (3, "sym")])
def test_two_solutions_differ_by_symmetric_tensor(n, variant):
    a = cn.gamma_C_solution(n, variant, "sum")
    b = cn.gamma_C_solution(n, variant, "first")
    d = {k: a[k] - b[k] for k in a}
    assert any(not e.is_zero() for e in d.values())
    assert cn.symmetric_part_check(d, n, variant == "sym") == []


@pytest.mark.parametrize("variant", ["full", "sym"])
def test_symmetric_perturbation_preserves_cc(variant):
    c = cn.canonical_connection(2, variant)
    t = cn.random_symmetric_difference(2, random.Random(4), variant)
    assert cn.check_conditions(cn.add_symmetric_difference(c, t)).ok


def test_sym_curvature_form():
    recs = cn.sym_curvature_residuals(cn.canonical_connection(2, "sym"))
    assert recs and all(r.verdict.zero for r in recs)


def test_hamiltonian_of_constant():
    c = cn.canonical_connection(2, "full")
    assert cn.covariant_hamiltonian1(R.const(5), c) == R.const(-5)


def test_hamiltonian_of_single_jet():
    c = cn.canonical_connection(2, "full")
    assert cn.covariant_hamiltonian1(R.y1(1, 1, 1), c) == c.gM(1, 1, 1)
    assert c.gM(1, 1, 1) == -2 * (y(1, 1) * R.A(1, 1, 1) + y(1, 2) * R.A(2, 1, 1))


def test_reproducing_jet_has_zero_hamiltonian():
    c = cn.canonical_connection(2, "full")
    L = R.y1(1, 1, 1) + c.gM(1, 1, 1)
    assert cn.covariant_hamiltonian1(L, c).is_zero()
    # with the opposite sign the Hamiltonian is 2 gamma_111
    assert cn.covariant_hamiltonian1(R.y1(1, 1, 1) - c.gM(1, 1, 1), c) == 2 * c.gM(1, 1, 1)


def test_palatini_hamiltonian_zero():
    c = cn.canonical_connection(2, "sym")
    assert cn.covariant_hamiltonian1(palatini(2).expr, c).is_zero()


def test_hamiltonian_rejects_foreign_chart():
    with pytest.raises(ValueError):
        cn.covariant_hamiltonian1(R.y2(1, 1, 1, 1), cn.canonical_connection(2, "full"))


def test_translation_commutes_with_D():
    c = cn.canonical_connection(2, "full")
    assert generators(2, "full").by_label("X^2").bracket(c.D()).is_zero()


def test_top_generator_bracket():
    c = cn.canonical_connection(2, "full")
    g = generators(2, "full").by_label("X^112_2")
    assert g.bracket(c.D()) == g


@pytest.mark.parametrize("variant", ["full", "sym"])
def test_bracket_membership_all_generators(variant):
    c = cn.canonical_connection(2, variant)
    gs = generators(2, variant)
    rng = random.Random(8)
    pts = [random_generic_point(gs.chart, rng) for _ in range(2)]
    for g in gs:
        ok, flags = cn.bracket_membership(g, c, pts, gs)
        assert ok, g.label


def test_defined_on_C_record_for_y_dependent_entries():
    c = cn.canonical_connection(2, "sym")
    gC = dict(c.gamma_C)
    gC[(1, 1, 1, 1)] = gC[(1, 1, 1, 1)] + y(1, 1)
    names = [r.name for r in cn.check_conditions(c.with_gamma_C(gC)).failures]
    assert any("defined on C" in n for n in names)


def test_connection_json_keys():
    j = cn.canonical_connection(2, "sym").to_json()
    assert j["chart"] == "MxCsym"
    assert "g_121" in j["gamma_M"]
    assert "G^1_121" in j["gamma_C"]
