"""Seeded random polynomials and forms for randomized checks."""

from __future__ import annotations

import random
from typing import List, Optional, Sequence

from .forms import Form
from .jet import Algebra, Expr, Var
from .scalar import mpq


def jet_variables(alg: Algebra, max_order: int, fields: Optional[Sequence[int]] = None) -> List[Var]:
    from .rewrite import _indices

    fids = range(len(alg.fields)) if fields is None else fields
    return [(0, f, idx) for f in fids for idx in _indices(alg.n, max_order)]


def random_scalar(rng: random.Random, bound: int = 3):
    num = 0
    while num == 0:
        num = rng.randint(-bound, bound)
    return mpq(num, rng.randint(1, 2))


def random_expr(
    alg: Algebra,
    rng: random.Random,
    variables: Sequence[Var],
    max_degree: int = 2,
    n_terms: int = 3,
    constant: bool = True,
) -> Expr:
    out = alg.zero()
    for _ in range(n_terms):
        deg = rng.randint(0 if constant else 1, max_degree)
        term = alg.const(random_scalar(rng))
        for _ in range(deg):
            term = term * alg.var_expr(rng.choice(list(variables)))
        out = out + term
    return out


def random_horizontal_one_form(alg: Algebra, rng: random.Random, max_order: int = 1, max_degree: int = 2, n_terms: int = 2) -> Form:
    """x-independent ω = Σ w_j dx^j with small random coefficients."""
    vs = jet_variables(alg, max_order)
    w = Form.zero(alg)
    for j in range(alg.n):
        w = w + Form.monomial(random_expr(alg, rng, vs, max_degree, n_terms), (), (j,))
    return w
