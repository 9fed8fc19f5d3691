from hypothesis import given
from hypothesis import strategies as st

from multiform.forms import (
    Form,
    MultiVectorField,
    VerticalShift,
    horizontal_d,
    interior,
    shift_action,
    vertical_delta,
    wedge,
)

from strategies import algebras, exprs, forms


def degree(w):
    p, q = w.bidegree()
    return p + q


@given(st.data())
def test_d_squared_vanishes(data):
    alg = data.draw(algebras)
    w = data.draw(forms(alg))
    assert not horizontal_d(horizontal_d(w))


@given(st.data())
def test_delta_squared_vanishes(data):
    alg = data.draw(algebras)
    w = data.draw(forms(alg))
    assert not vertical_delta(vertical_delta(w))


@given(st.data())
def test_d_and_delta_anticommute(data):
    alg = data.draw(algebras)
    w = data.draw(forms(alg))
    assert not (horizontal_d(vertical_delta(w)) + vertical_delta(horizontal_d(w)))


@given(st.data())
def test_graded_leibniz(data):
    alg = data.draw(algebras)
    p1, q1 = data.draw(st.integers(0, 1)), data.draw(st.integers(0, 1))
    a = data.draw(forms(alg, p1, q1, max_terms=1))
    b = data.draw(forms(alg, max_terms=1))
    sign = -1 if (p1 + q1) % 2 else 1
    for op in (horizontal_d, vertical_delta):
        lhs = op(wedge(a, b))
        rhs = wedge(op(a), b) + wedge(a, op(b)) * sign
        assert lhs == rhs


@given(st.data())
def test_cartan_formula_for_shift(data):
    alg = data.draw(algebras)
    i = data.draw(st.integers(0, alg.n - 1))
    w = data.draw(forms(alg, q=data.draw(st.integers(0, 1))))
    X = VerticalShift(i)
    assert shift_action(i, w) == vertical_delta(interior(X, w)) + interior(X, vertical_delta(w))


@given(st.data())
def test_total_derivatives_commute(data):
    alg = data.draw(algebras)
    e = data.draw(exprs(alg))
    i, j = data.draw(st.integers(0, alg.n - 1)), data.draw(st.integers(0, alg.n - 1))
    assert e.total_derivative(i).total_derivative(j) == e.total_derivative(j).total_derivative(i)


def test_d_of_delta_generator_sign(pkdv):
    # d(δv) = -Σ δv_j ∧ dx^j
    alg = pkdv.alg
    v = alg.jetvar("v")
    got = horizontal_d(Form.delta(alg, v))
    want = Form.zero(alg)
    for j in range(alg.n):
        want = want - Form.monomial(alg.one(), [alg.jetvar("v", alg.index_from_labels([alg.labels[j]]))], [j])
    assert got == want


def test_interior_order_contracts_horizontal_first(pkdv):
    alg = pkdv.alg
    v, v1 = alg.jetvar("v"), alg.jetvar("v", alg.index_from_labels([1]))
    w = Form.monomial(alg.one(), [v, v1], [2])
    xi = MultiVectorField.bivector(alg, {(v1, 2): alg.one()})
    # ι_{∂_{v1}∧∂_3}(δv∧δv1∧dx^3): ι_{∂_3} first gives δv∧δv1, then ι_{∂_{v1}} gives -δv
    assert interior(xi, w) == -Form.delta(alg, v)


def test_wedge_anticommutes_odd_generators(pkdv):
    alg = pkdv.alg
    a, b = Form.dx(alg, 0), Form.delta(alg, alg.jetvar("v"))
    assert wedge(a, b) == -wedge(b, a)
    assert not wedge(a, a)
