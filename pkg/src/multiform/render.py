"""Text, JSON and LaTeX renderings of engine objects.

The text rendering is the DSL surface syntax, so ``parse(render(x)) == x``.
"""

from __future__ import annotations

import json
from typing import Any, Dict, List, Sequence

from .jet import Algebra, Expr, Monomial, Var
from .scalar import Scalar, format_scalar, imag_part, real_part

FORMATS = ("text", "json", "latex")


# ---------------------------------------------------------------------------
# text


def display_order(m: Monomial):
    """Factor order for printing: field, then derivative order, then directions."""
    return sorted(m, key=lambda t: (t[0][0], t[0][1], sum(t[0][2]), tuple(-k for k in t[0][2])))


def _mono_text(alg: Algebra, m: Monomial) -> str:
    parts = []
    for v, e in display_order(m):
        name = alg.var_name(v)
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def _is_negative(c: Scalar) -> bool:
    re, im = real_part(c), imag_part(c)
    return re < 0 if im == 0 else (re == 0 and im < 0)


def _term_text(alg: Algebra, m: Monomial, c: Scalar, first: bool) -> str:
    neg = _is_negative(c)
    mag = -c if neg else c
    body = _mono_text(alg, m)
    if not body:
        coeff = format_scalar(mag)
    elif mag == 1:
        coeff = ""
    else:
        coeff = format_scalar(mag) + "*"
    s = coeff + body
    if first:
        return ("-" if neg else "") + s
    return (" - " if neg else " + ") + s


def render_expr(e: Expr) -> str:
    if not e.terms:
        return "0"
    return "".join(_term_text(e.alg, m, c, i == 0) for i, (m, c) in enumerate(e.sorted_terms()))


def _basis_text(alg: Algebra, deltas: Sequence[Var], dxs: Sequence[int]) -> str:
    parts = [f"del {alg.var_name(v)}" for v in deltas]
    parts += [f"d x{alg.labels[j]}" for j in dxs]
    return " ^ ".join(parts)


def render_form(w) -> str:
    if not w.terms:
        return "0"
    out = []
    for (ds, xs), c in sorted(w.terms.items(), key=_form_key):
        basis = _basis_text(w.alg, ds, xs)
        coeff = render_expr(c)
        if not basis:
            term = f"({coeff})"
        elif coeff == "1":
            term = basis
        elif coeff == "-1":
            term = f"-{basis}"
        else:
            term = f"({coeff}) * {basis}"
        out.append(term)
    s = out[0]
    for t in out[1:]:
        s += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return s


def _form_key(item):
    (ds, xs), _ = item
    return (len(xs), xs, len(ds), ds)


def render_vectorfield(xi) -> str:
    if not xi.terms:
        return "0"
    out = []
    for (vs, hs), c in sorted(xi.terms.items(), key=lambda t: (t[0][1], t[0][0])):
        basis = " ^ ".join([f"D {xi.alg.var_name(v)}" for v in vs] + [f"D x{xi.alg.labels[j]}" for j in hs])
        out.append(f"({render_expr(c)}) * {basis}")
    return " + ".join(out)


def render_equation(lhs: Expr, rhs: Expr) -> str:
    return f"{render_expr(lhs)} = {render_expr(rhs)}"


# ---------------------------------------------------------------------------
# LaTeX


def _latex_scalar(c: Scalar) -> str:
    re, im = real_part(c), imag_part(c)

    def frac(q) -> str:
        return str(q.numerator) if q.denominator == 1 else f"\\frac{{{q.numerator}}}{{{q.denominator}}}"

    if im == 0:
        return frac(re)
    imag = ("" if abs(im) == 1 else frac(abs(im))) + "i"
    if re == 0:
        return ("-" if im < 0 else "") + imag
    return f"\\left({frac(re)}{'-' if im < 0 else '+'}{imag}\\right)"


def _latex_var(alg: Algebra, v: Var) -> str:
    if v[0] == 1:
        name = alg.generators[v[1]].name
        if "_" in name:
            head, arg = name.split("_", 1)
            if head in ("cos", "sin") and arg in alg.fields:
                return f"\\{head} {arg}"
        return f"\\mathrm{{{name}}}"
    name = alg.fields[v[1]]
    labs = alg.index_labels(v[2])
    return f"{name}_{{{''.join(map(str, labs))}}}" if labs else name


def latex_expr(e: Expr) -> str:
    if not e.terms:
        return "0"
    out = []
    for m, c in e.sorted_terms():
        neg = _is_negative(c)
        mag = -c if neg else c
        body = ""
        for v, k in display_order(m):
            t = _latex_var(e.alg, v)
            body += t if k == 1 else f"{t}^{{{k}}}"
        if not body:
            term = _latex_scalar(mag)
        elif mag == 1:
            term = body
        else:
            term = _latex_scalar(mag) + body
        if out:
            out.append(("-" if neg else "+") + term)
        else:
            out.append(("-" if neg else "") + term)
    return "".join(out)


def latex_vectorfield(xi) -> str:
    if not xi.terms:
        return "0"
    out = []
    for (vs, hs), c in sorted(xi.terms.items(), key=lambda t: (t[0][1], t[0][0])):
        basis = " \\wedge ".join(
            [f"\\partial_{{{_latex_var(xi.alg, v)}}}" for v in vs] + [f"\\partial_{{{xi.alg.labels[j]}}}" for j in hs]
        )
        out.append(f"\\left({latex_expr(c)}\\right) {basis}")
    return " + ".join(out)


def latex_form(w) -> str:
    if not w.terms:
        return "0"
    out = []
    for (ds, xs), c in sorted(w.terms.items(), key=_form_key):
        parts = [f"\\delta {_latex_var(w.alg, v)}" for v in ds]
        if xs:
            parts.append("dx^{" + "".join(str(w.alg.labels[j]) for j in xs) + "}")
        basis = " \\wedge ".join(parts)
        coeff = latex_expr(c)
        if not basis:
            out.append(f"({coeff})")
        elif coeff == "1":
            out.append(basis)
        elif coeff == "-1":
            out.append("-" + basis)
        elif len(c.terms) == 1:
            out.append(f"{coeff}\\, {basis}")
        else:
            out.append(f"\\left({coeff}\\right) {basis}")
    s = out[0]
    for t in out[1:]:
        s += t if t.startswith("-") else "+" + t
    return s


# ---------------------------------------------------------------------------
# JSON


def _json_scalar(c: Scalar) -> Dict[str, List[int]]:
    re, im = real_part(c), imag_part(c)
    return {"re": [int(re.numerator), int(re.denominator)], "im": [int(im.numerator), int(im.denominator)]}


def _json_monomial(alg: Algebra, m: Monomial) -> List[Dict[str, Any]]:
    return [{"var": alg.var_name(v), "exp": k} for v, k in m]


def expr_json(e: Expr, kind: str = "expr") -> Dict[str, Any]:
    return {
        "kind": kind,
        "terms": [
            {"coeff": _json_scalar(c), "monomial": _json_monomial(e.alg, m), "delta": [], "dx": []}
            for m, c in e.sorted_terms()
        ],
    }


def form_json(w, kind: str = "form") -> Dict[str, Any]:
    terms = []
    for (ds, xs), c in sorted(w.terms.items(), key=_form_key):
        for m, k in c.sorted_terms():
            terms.append(
                {
                    "coeff": _json_scalar(k),
                    "monomial": _json_monomial(w.alg, m),
                    "delta": [w.alg.var_name(v) for v in ds],
                    "dx": [w.alg.labels[j] for j in xs],
                }
            )
    return {"kind": kind, "terms": terms}


def vectorfield_json(xi, kind: str = "vectorfield") -> Dict[str, Any]:
    """Same layout as forms: ``delta`` lists the vertical factors, ``dx`` the horizontal ones."""
    terms = []
    for (vs, hs), c in sorted(xi.terms.items(), key=lambda t: (t[0][1], t[0][0])):
        for m, k in c.sorted_terms():
            terms.append(
                {
                    "coeff": _json_scalar(k),
                    "monomial": _json_monomial(xi.alg, m),
                    "delta": [xi.alg.var_name(v) for v in vs],
                    "dx": [xi.alg.labels[j] for j in hs],
                }
            )
    return {"kind": kind, "terms": terms}


def to_json(obj) -> Dict[str, Any]:
    from .forms import Form, MultiVectorField

    if isinstance(obj, Expr):
        return expr_json(obj)
    if isinstance(obj, Form):
        return form_json(obj)
    if isinstance(obj, MultiVectorField):
        return vectorfield_json(obj)
    raise TypeError(f"no JSON rendering for {type(obj).__name__}")


def render(obj, fmt: str = "text") -> str:
    """Render an Expr or Form as ``text``, ``json`` or ``latex``."""
    from .forms import Form, MultiVectorField

    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    if fmt == "json":
        return json.dumps(to_json(obj), sort_keys=True)
    if isinstance(obj, Expr):
        return render_expr(obj) if fmt == "text" else latex_expr(obj)
    if isinstance(obj, Form):
        return render_form(obj) if fmt == "text" else latex_form(obj)
    if isinstance(obj, MultiVectorField):
        return render_vectorfield(obj) if fmt == "text" else latex_vectorfield(obj)
    raise TypeError(f"cannot render {type(obj).__name__}")


JSON_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "multiform object",
    "type": "object",
    "required": ["kind", "terms"],
    "properties": {
        "kind": {"type": "string"},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["coeff", "monomial", "delta", "dx"],
                "properties": {
                    "coeff": {
                        "type": "object",
                        "required": ["re", "im"],
                        "properties": {
                            "re": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                            "im": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                        },
                    },
                    "monomial": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["var", "exp"],
                            "properties": {"var": {"type": "string"}, "exp": {"type": "integer", "minimum": 1}},
                        },
                    },
                    "delta": {"type": "array", "items": {"type": "string"}},
                    "dx": {"type": "array", "items": {"type": "integer"}},
                },
            },
        },
    },
}
