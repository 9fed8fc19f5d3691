import json
import re

import jsonschema
import pytest

from multiform import render, to_json
from multiform.forms import Form
from multiform.poisson import hamiltonian_vector_field
from multiform.render import JSON_SCHEMA

from conftest import CORPUS, expr, form, hierarchy


def latex_terms(s):
    """Signed top-level terms of a parenthesis-free LaTeX sum."""
    return sorted(t if t[0] in "+-" else "+" + t for t in re.findall(r"[+-]?[^+-]+", s))


def test_zero_renders_as_zero(pkdv):
    z = pkdv.alg.zero()
    assert render(z) == "0" and render(z, "latex") == "0"
    assert render(Form.zero(pkdv.alg)) == "0"


def test_text_is_deterministic(pkdv):
    a = expr(pkdv, "v[1]*v[3] - 4*v[1]^3 + v[1,1]^2 - 2*v[1]*v[1,1,1]")
    b = expr(pkdv, "-2*v[1,1,1]*v[1] + v[1,1]^2 + v[3]*v[1] - 4*v[1]^3")
    assert render(a) == render(b) == "-4*v[1]^3 + v[1]*v[3] - 2*v[1]*v[1,1,1] + v[1,1]^2"


def test_latex_h13_terms(pkdv):
    out = render(pkdv.hamiltonian.H(0, 2), "latex")
    assert latex_terms(out) == latex_terms("v_{1}v_{3}-4v_{1}^{3}+v_{11}^{2}-2v_{1}v_{111}")


def test_latex_forms_use_subscripts_and_dx(pkdv):
    w = form(pkdv, "-v[1]*del v ^ d x1 + v[1,1]*del v[1] ^ d x3")
    out = render(w, "latex")
    assert "\\delta v \\wedge dx^{1}" in out and "\\delta v_{1} \\wedge dx^{3}" in out
    assert render(Form.dx(pkdv.alg, 0, 2), "latex") == "dx^{13}"


def test_latex_fractions_and_imaginary_unit():
    h = hierarchy("akns1234")
    assert render(expr(h, "i/2*q[1]*r"), "latex") == "\\frac{1}{2}iq_{1}r"
    assert render(expr(h, "-3/4*q"), "latex") == "-\\frac{3}{4}q"


def test_vector_field_rendering(pkdv):
    hf = hamiltonian_vector_field(Form.function(pkdv.hamiltonian.H(0, 1)), pkdv.symplectic)
    assert render(hf.vectorfield) == "(v[2]) * D v ^ D x1 + (-v[1]) * D v ^ D x2"
    assert "\\partial_{v} \\wedge \\partial_{1}" in render(hf.vectorfield, "latex")


@pytest.mark.parametrize("name", CORPUS)
def test_json_validates_against_schema(name):
    h = hierarchy(name)
    for obj in (h.omega1, h.symplectic.form(), h.hamiltonian.form(), h.L.L(0, 1)):
        doc = json.loads(render(obj, "json"))
        jsonschema.validate(doc, JSON_SCHEMA)
        assert doc == to_json(obj)


def test_json_layout():
    h = hierarchy("akns1234")
    doc = to_json(form(h, "i/2*q*del r ^ d x2"))
    assert doc == {
        "kind": "form",
        "terms": [
            {
                "coeff": {"re": [0, 1], "im": [1, 2]},
                "monomial": [{"var": "q", "exp": 1}],
                "delta": ["r"],
                "dx": [2],
            }
        ],
    }


def test_unknown_format_rejected(pkdv):
    with pytest.raises(ValueError):
        render(pkdv.alg.zero(), "html")
    with pytest.raises(TypeError):
        to_json(3)
