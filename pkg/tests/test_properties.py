"""Property-based checks of algebraic laws on random inputs."""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from jetcheck.charts import metric_det
from jetcheck.connections import canonical_connection, covariant_hamiltonian1
from jetcheck.lagrangians import palatini
from jetcheck.lifts import BaseVectorField, lift_metric, lift_product, total_derivative
from jetcheck.symexpr import VarId, from_prefix, get_ring, to_prefix

R = get_ring(2)
SETTINGS = settings(max_examples=25, deadline=None)

coeff = st.integers(-4, 4)
J1_VARS = [VarId.y(1, 1), VarId.y(1, 2), VarId.y(2, 2), VarId.y1(1, 1, 2), VarId.y1(1, 2, 1), VarId.A(1, 1, 2, True), VarId.A1(2, 1, 1, 2, True)]


@st.composite
def base_fields(draw, degree=2):
    mons = [R.one, R.x(1), R.x(2), R.x(1) * R.x(2), R.x(1) ** 2, R.x(2) ** 2][: 1 + 2 * degree]
    comps = []
    for _ in range(2):
        e = R.zero
        for m in mons:
            e = e + draw(coeff) * m
        comps.append(e)
    return BaseVectorField(2, comps)


@st.composite
def polys(draw, variables=J1_VARS):
    e = R.const(draw(coeff))
    for _ in range(draw(st.integers(1, 4))):
        a = R.var(draw(st.sampled_from(variables)))
        b = R.var(draw(st.sampled_from(variables)))
        e = e + draw(coeff) * a * b + draw(coeff) * a
    return e


@st.composite
def rationals(draw):
    return polys_to_rational(draw(polys()), draw(polys()))


def polys_to_rational(a, b):
    return a / b if not b.is_zero() else a


@SETTINGS
@given(rationals(), rationals())
def test_diff_leibniz(a, b):
    v = VarId.y(1, 1)
    assert (a * b).diff(v) == a.diff(v) * b + a * b.diff(v)


@SETTINGS
@given(rationals())
def test_prefix_roundtrip(e):
    assert from_prefix(R, to_prefix(e)) == e


@SETTINGS
@given(rationals(), rationals())
def test_field_axioms(a, b):
    assert a + b - b == a
    if not b.is_zero():
        assert (a / b) * b == a


@SETTINGS
@given(polys(), polys())
def test_D_gamma_is_derivation(a, b):
    D = canonical_connection(2, "sym").D()
    assert D.apply(a * b) == a * D.apply(b) + b * D.apply(a)


@SETTINGS
@given(polys())
def test_hamiltonian_of_square(L):
    c = canonical_connection(2, "sym")
    assert covariant_hamiltonian1(L * L, c) == 2 * L * c.D().apply(L) - L * L


@SETTINGS
@given(base_fields())
def test_volume_compatibility(u):
    # X_M(det y) = -2 div(u) det y
    div = u.du(1, 1) + u.du(2, 2)
    det = metric_det(2)
    assert lift_metric(u).apply(det) == -2 * div * det


@SETTINGS
@given(base_fields(), base_fields())
def test_lift_homomorphism(u, w):
    assert lift_product(u).bracket(lift_product(w)) == lift_product(u.bracket(w))


@SETTINGS
@given(base_fields(), st.integers(-3, 3))
def test_lift_is_linear(u, k):
    assert lift_product(u.scale(k)) == lift_product(u).scale(k)


@SETTINGS
@given(base_fields())
def test_palatini_annihilated_by_lifts(u):
    assert lift_product(u, symmetric=True).apply(palatini(2).expr).is_zero()


METRIC_VARS = [VarId.x(1), VarId.y(1, 1), VarId.y(1, 2), VarId.y(2, 2), VarId.y1(1, 1, 2), VarId.y1(2, 2, 1)]


@SETTINGS
@given(polys(METRIC_VARS))
def test_total_derivatives_commute(f):
    lhs = total_derivative(total_derivative(f, 1, True), 2, True)
    rhs = total_derivative(total_derivative(f, 2, True), 1, True)
    assert lhs == rhs


@SETTINGS
@given(st.fractions(max_denominator=50).filter(lambda q: q != 0))
def test_evaluate_constant(q):
    assert R.const(q).evaluate({}) == Fraction(q)
