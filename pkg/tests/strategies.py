"""Hypothesis strategies for polynomials and forms over the corpus algebras."""

from hypothesis import strategies as st

from multiform.forms import Form
from multiform.scalar import mpq, scalar
from multiform.sampling import jet_variables

from conftest import hierarchy

ALGEBRAS = ["pkdv123", "sg123", "akns1234"]


def variables(alg, max_order=2):
    vs = jet_variables(alg, max_order)
    return vs + [(1, g, ()) for g in range(len(alg.generators))]


@st.composite
def scalars(draw, gaussian=False):
    num = draw(st.integers(-4, 4).filter(bool))
    den = draw(st.integers(1, 3))
    if gaussian and draw(st.booleans()):
        return scalar(0, mpq(num, den))
    return mpq(num, den)


@st.composite
def exprs(draw, alg, max_order=2, max_degree=3, max_terms=3):
    vs = variables(alg, max_order)
    # the two-field corpus algebra (AKNS) has genuinely complex coefficients
    gaussian = len(alg.fields) > 1
    out = alg.zero()
    for _ in range(draw(st.integers(0, max_terms))):
        term = alg.const(draw(scalars(gaussian)))
        for v in draw(st.lists(st.sampled_from(vs), max_size=max_degree)):
            term = term * alg.var_expr(v)
        out = out + term
    return out


@st.composite
def forms(draw, alg, p=None, q=None, max_terms=2, max_order=1):
    """Random (p,q)-form; degrees drawn when not fixed."""
    jets = [v for v in variables(alg, max_order) if v[0] == 0]
    out = Form.zero(alg)
    pp = draw(st.integers(0, 2)) if p is None else p
    qq = draw(st.integers(0, alg.n)) if q is None else q
    for _ in range(draw(st.integers(1, max_terms))):
        ds = draw(st.lists(st.sampled_from(jets), min_size=pp, max_size=pp, unique=True))
        xs = draw(st.permutations(range(alg.n)))[:qq]
        out = out + Form.monomial(draw(exprs(alg, max_order=max_order, max_terms=2)), ds, xs)
    return out


algebras = st.sampled_from(ALGEBRAS).map(lambda name: hierarchy(name).alg)
