import random

import pytest

from jetcheck.lifts import (
    BaseVectorField,
    VectorField,
    lift_connection,
    lift_metric,
    lift_metric_prolonged,
    lift_product,
    prolong,
    random_base_field,
    total_derivative,
)
from jetcheck.charts import ChartSpec
from jetcheck.symexpr import VarId, get_ring, substitute

R = get_ring(2)
x1, x2 = R.x(1), R.x(2)


def fibre(X: VectorField, kind: str) -> dict:
    return {v: c for v, c in X.components.items() if v.kind == kind}


def test_translation_lifts_to_translation():
    X = lift_metric([1, 0])
    assert X.components == {VarId.x(1): R.one}


def test_metric_lift_x2_d1():
    X = lift_metric([x2, 0])
    assert X[VarId.y(1, 1)].is_zero()
    assert X[VarId.y(1, 2)] == -R.y(1, 1)
    assert X[VarId.y(2, 2)] == -2 * R.y(1, 2)


def test_metric_lift_x1_d1():
    X = lift_metric([x1, 0])
    assert X[VarId.y(1, 1)] == -2 * R.y(1, 1)
    assert X[VarId.y(1, 2)] == -R.y(1, 2)
    assert X[VarId.y(2, 2)].is_zero()


@pytest.mark.parametrize("sym", [False, True])
def test_connection_lift_of_translation(sym):
    X = lift_connection([1, 0], symmetric=sym)
    assert not fibre(X, "A")


def test_connection_lift_x1_d1():
    X = lift_connection([x1, 0])
    assert X[VarId.A(1, 1, 1)] == -R.A(1, 1, 1)


def test_connection_lift_second_derivative_term():
    X = lift_connection([x1**2, 0])
    at0 = {VarId.x(1): 0, VarId.x(2): 0}
    assert substitute(X[VarId.A(1, 1, 1)], at0) == R.const(-2)


def test_prolonged_metric_translation():
    X = prolong(lift_metric([1, 0]), 1)
    assert X.components == {VarId.x(1): R.one}


def test_prolonged_metric_x2_d1_component():
    # u^1 = x2 has only du^1/dx2 = 1, so y_11,2 picks up -(y_11,1 + 0) terms from the transport
    X = lift_metric_prolonged([x2, 0])
    assert X[VarId.y1(1, 1, 2)] == -R.y1(1, 1, 1)
    assert X[VarId.y1(1, 2, 2)] == -R.y1(1, 1, 2) - R.y1(1, 2, 1)
    assert X[VarId.y1(1, 1, 1)].is_zero()


def test_product_lift_x1_d1_connection_jet():
    X = lift_product([x1, 0])
    assert X[VarId.A1(1, 1, 1, 1)] == -2 * R.A1(1, 1, 1, 1)


def test_product_lift_metric_part_agrees_with_prolongation():
    u = BaseVectorField(2, [x1 * x2 + 3, x1**2])
    P = lift_product(u)
    Q = lift_metric_prolonged(u)
    for v, c in Q.components.items():
        assert P[v] == c


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("sym", [False, True])
def test_prolongation_equals_closed_form_connection_jets(n, sym):
    rng = random.Random(n * 10 + sym)
    u = random_base_field(n, rng, 3)
    P = prolong(lift_connection(u, symmetric=sym), 1)
    Q = lift_product(u, symmetric=sym)
    for v, c in P.components.items():
        assert Q[v] == c, v.name


def test_prolongation_equals_closed_form_metric_jets():
    rng = random.Random(7)
    for _ in range(3):
        u = random_base_field(2, rng, 3)
        assert prolong(lift_metric(u), 1) == lift_metric_prolonged(u)


def test_homomorphism_example():
    X = BaseVectorField(2, [0, x1])
    Y = BaseVectorField(2, [x2, 0])
    assert lift_product(X).bracket(lift_product(Y)) == lift_product(X.bracket(Y))


def test_homomorphism_on_second_jets():
    X = BaseVectorField(2, [x1 * x2, 1])
    Y = BaseVectorField(2, [x2**2, x1])
    lhs = prolong(lift_metric(X), 2).bracket(prolong(lift_metric(Y), 2))
    assert lhs == prolong(lift_metric(X.bracket(Y)), 2)


def test_total_derivative_of_metric_coordinate():
    assert total_derivative(R.y(1, 2), 1) == R.y1(1, 2, 1)
    assert total_derivative(R.y1(1, 2, 2), 1) == R.y2(1, 2, 1, 2)
    assert total_derivative(x1 * R.y(1, 1), 1) == R.y(1, 1) + x1 * R.y1(1, 1, 1)


def test_base_field_rejects_fibre_dependence():
    with pytest.raises(ValueError):
        BaseVectorField(2, [R.y(1, 1), 0])


def test_vector_field_rejects_foreign_coordinates():
    with pytest.raises(ValueError):
        VectorField(ChartSpec(2, "M"), {VarId.A(1, 1, 1): R.one})


def test_bracket_is_antisymmetric():
    X = lift_product([x1 * x2, x2])
    Y = lift_product([1, x1**2])
    assert (X.bracket(Y) + Y.bracket(X)).is_zero()
