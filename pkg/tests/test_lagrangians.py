import random
from fractions import Fraction

import pytest

from jetcheck import lagrangians as lg
from jetcheck.charts import ChartSpec
from jetcheck.connections import canonical_connection
from jetcheck.secondorder import gamma2_from_gamma1, covariant_hamiltonian2, pullback_zeta2
from jetcheck.symexpr import CheckOptions, VarId, get_ring, substitute

R = get_ring(2)


def flat(chart):
    pt = {}
    for v in chart.coordinates():
        if v.kind == "y":
            pt[v] = Fraction(int(v.idx[0] == v.idx[1]))
        elif v.kind != "x":
            pt[v] = Fraction(0)
    return pt


def test_palatini_flat_point():
    L = lg.palatini(2)
    assert substitute(L.expr, flat(L.chart)).is_zero()


def test_palatini_single_coordinate_probes():
    # at y = identity with a single nonzero A_,l the curvature is linear in it
    L = lg.palatini(2)
    base = flat(L.chart)
    pt = dict(base)
    pt[VarId.A1(1, 2, 2, 1, True)] = Fraction(1)
    assert L.expr.evaluate(pt) == 1  # y^22 A^1_22,1
    pt = dict(base)
    pt[VarId.A1(1, 1, 2, 2, True)] = Fraction(1)
    assert L.expr.evaluate(pt) == -1  # enters only as -y^22 A^1_21,2
    pt = dict(base)
    pt[VarId.A1(1, 1, 1, 1, True)] = Fraction(1)
    assert L.expr.evaluate(pt) == 0  # A^k_ij,k - A^k_ik,j cancels for i=j=k


def test_palatini_chart():
    assert lg.palatini(3).chart == ChartSpec(3, "J1MxCsym")


def test_einstein_hilbert_flat_point():
    L = lg.einstein_hilbert(2)
    assert substitute(L.expr, flat(L.chart)).is_zero()


def test_einstein_hilbert_matches_curvature():
    assert lg.einstein_hilbert(2).expr == lg.einstein_hilbert_curvature(2).expr


def test_einstein_hilbert_is_palatini_pullback():
    assert pullback_zeta2(lg.palatini(2).expr) == lg.einstein_hilbert(2).expr


def test_einstein_hilbert_affine_in_second_jets():
    L = lg.einstein_hilbert(2).expr
    jets = [v for v in ChartSpec(2, "J2M").coordinates() if v.kind == "y2"]
    used = {a for a in jets if L.depends_on(a)}
    assert used == {VarId.y2(1, 1, 2, 2), VarId.y2(2, 2, 1, 1), VarId.y2(1, 2, 1, 2)}
    for a in jets:
        da = L.diff(a)
        for b in jets:
            assert da.diff(b).is_zero()


def test_round_metric_scalar_curvature():
    # unit 2-sphere in (theta, phi): y = diag(1, sin^2); curvature 2.  At theta with
    # s = sin, c = cos: y_22,1 = 2sc, y_22,11 = 2(c^2 - s^2); take s = 3/5, c = 4/5.
    s, c = Fraction(3, 5), Fraction(4, 5)
    pt = {v: Fraction(0) for v in ChartSpec(2, "J2M").coordinates()}
    pt[VarId.y(1, 1)] = Fraction(1)
    pt[VarId.y(2, 2)] = s * s
    pt[VarId.y1(2, 2, 1)] = 2 * s * c
    pt[VarId.y2(2, 2, 1, 1)] = 2 * (c * c - s * s)
    assert lg.einstein_hilbert(2).expr.evaluate(pt) == 2


def test_compose_poly():
    L = lg.einstein_hilbert(2)
    assert lg.compose_poly(L, [0, 1]).expr == L.expr
    assert lg.compose_poly(L, [-1, 0, 2]).expr == 2 * L.expr**2 - 1
    assert lg.poly_derivative([5, -2, 0, 1]) == [-2, 0, 3]


@pytest.mark.parametrize("f", [[0, 0, 1], [0, 0, 0, 1], [0, -2, 0, 1]])
def test_f_identity(f):
    c2 = gamma2_from_gamma1(canonical_connection(2, "sym"))
    L = lg.einstein_hilbert(2)
    lhs = covariant_hamiltonian2(lg.compose_poly(L, f).expr, c2)
    rhs = lg.poly_eval(lg.poly_derivative(f), L.expr) * L.expr - lg.compose_poly(L, f).expr
    assert lhs == rhs


def test_f_identity_cubic_value():
    c2 = gamma2_from_gamma1(canonical_connection(2, "sym"))
    L = lg.einstein_hilbert(2)
    assert covariant_hamiltonian2(lg.compose_poly(L, [0, -2, 0, 1]).expr, c2) == 2 * L.expr**3


def test_named_lookup():
    assert lg.named("eh-squared", 2).expr == lg.einstein_hilbert(2).expr ** 2
    with pytest.raises(KeyError):
        lg.named("maxwell", 2)


def test_lagrangian_rejects_foreign_coordinates():
    with pytest.raises(ValueError):
        lg.Lagrangian(ChartSpec(2, "J1M"), R.A(1, 1, 1), "bad")


def test_zero_hamiltonian_palatini():
    v = lg.zero_hamiltonian_test(lg.palatini(2), canonical_connection(2, "sym"))
    assert (v.affine, v.reproducing, v.hamiltonian_zero) == (True, True, True)


def test_zero_hamiltonian_square_of_velocity():
    v = lg.zero_hamiltonian_test(R.y1(1, 1, 1) ** 2, canonical_connection(2, "full"))
    assert not v.affine
    assert not v.hamiltonian_zero
    assert "condition_i" in v.witnesses


def test_zero_hamiltonian_reproducing_velocity():
    c = canonical_connection(2, "full")
    v = lg.zero_hamiltonian_test(R.y1(1, 1, 1) + c.gM(1, 1, 1), c)
    assert (v.affine, v.reproducing, v.hamiltonian_zero) == (True, True, True)
    w = lg.zero_hamiltonian_test(R.y1(1, 1, 1) - c.gM(1, 1, 1), c)
    assert w.affine and not w.reproducing and not w.hamiltonian_zero


@pytest.mark.parametrize("variant", ["full", "sym"])
def test_zero_hamiltonian_corpus(variant):
    c = canonical_connection(2, variant)
    corpus = lg.zero_hamiltonian_corpus(c, random.Random(1))
    assert len(corpus) == 20
    assert sum(want for _, _, want in corpus) == 10
    for name, L, want in corpus:
        v = lg.zero_hamiltonian_test(L, c)
        assert v.consistent, name
        assert v.hamiltonian_zero == want, name


def test_zero_hamiltonian_randomized_mode():
    c = canonical_connection(3, "sym")
    v = lg.zero_hamiltonian_test(lg.palatini(3), c, CheckOptions("randomized", 10, 42))
    assert v.hamiltonian_zero and v.consistent
