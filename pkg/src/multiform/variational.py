"""Variation of a Lagrangian multiform and its integration-by-parts decomposition.

``source_decompose`` writes δℒ = ℰ(ℒ) − dΩ⁽¹⁾.  Terms of δℒ are moved into
Ω⁽¹⁾ by repeated integration by parts; what cannot (or must not) be moved stays
in ℰ(ℒ), whose coefficients are the multiform Euler-Lagrange expressions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import NonDecomposable
from .forms import Form, horizontal_d, vertical_delta
from .jet import Algebra, Expr, Var, order, shift

Pair = Tuple[int, int]


@dataclass
class LagrangianMultiform:
    """ℒ = Σ_{i<j} L_ij dx^{ij}, keyed by direction positions."""

    alg: Algebra
    coefficients: Dict[Pair, Expr]

    def __post_init__(self):
        clean = {}
        for (i, j), e in self.coefficients.items():
            if i == j:
                continue
            if i > j:
                i, j, e = j, i, -e
            clean[(i, j)] = clean.get((i, j), self.alg.zero()) + e
        self.coefficients = clean

    @property
    def n(self) -> int:
        return self.alg.n

    def L(self, i: int, j: int) -> Expr:
        if i == j:
            return self.alg.zero()
        if i > j:
            return -self.coefficients.get((j, i), self.alg.zero())
        return self.coefficients.get((i, j), self.alg.zero())

    def form(self) -> Form:
        return Form(self.alg, {((), (i, j)): e for (i, j), e in self.coefficients.items() if e})

    @classmethod
    def from_form(cls, w: Form) -> "LagrangianMultiform":
        coeffs = {}
        for (ds, xs), c in w.terms.items():
            if ds or len(xs) != 2:
                raise ValueError("a Lagrangian multiform is a horizontal 2-form")
            coeffs[xs] = c
        return cls(w.alg, coeffs)

    def __add__(self, other: "LagrangianMultiform") -> "LagrangianMultiform":
        return LagrangianMultiform.from_form(self.form() + other.form())


@dataclass
class SourceDecomposition:
    """δℒ = source − d(omega1), checked on construction."""

    source: Form
    omega1: Form
    strategy: str = "peel"

    def verify(self, dL: Form) -> bool:
        return dL - self.source + horizontal_d(self.omega1) == Form.zero(dL.alg)


def delta_of_multiform(L: LagrangianMultiform) -> Form:
    return vertical_delta(L.form())


# ---------------------------------------------------------------------------
# peeling


def _peel_direction(index: Tuple[int, ...], pair: Pair) -> Optional[Tuple[int, int]]:
    """Direction c to integrate along and the remaining dx direction m.

    The space direction (position 0) is preferred whenever it is available,
    otherwise the smaller member of the pair.
    """
    a, b = pair
    for c, m in ((a, b), (b, a)):
        if index[c] > 0:
            return c, m
    return None


def _boundary_term(alg: Algebra, f: Expr, v: Var, pair: Pair) -> Form:
    """Form β with d(β) cancelling f δv ∧ dx^{pair} (plus lower-order spill)."""
    c, m = _peel_direction(v[2], pair)
    w = (0, v[1], shift(v[2], c, -1))
    probe = horizontal_d(Form.monomial(alg.one(), (w,), (m,)))
    s = probe.coefficient((v,), pair).constant_value()
    return Form.monomial(f * (-1 / s), (w,), (m,))


def _movable(v: Var, pair: Pair, space: int = 0) -> bool:
    """Only pairs containing the space direction are integrated by parts."""
    return space in pair


def peel(dL: Form, max_sweeps: int = 50) -> SourceDecomposition:
    alg = dL.alg
    residual = dL
    omega1 = Form.zero(alg)
    steps = 0
    limit = max_sweeps * max(1, len(dL.terms)) * 8
    while True:
        best = None
        for (ds, xs), f in residual.terms.items():
            if len(ds) != 1 or len(xs) != 2:
                continue
            v = ds[0]
            if order(v[2]) == 0 or not _movable(v, xs):
                continue
            if _peel_direction(v[2], xs) is None:
                continue
            key = (xs, -order(v[2]), v)
            if best is None or key < best[0]:
                best = (key, v, xs, f)
        if best is None:
            break
        _, v, xs, f = best
        beta = _boundary_term(alg, f, v, xs)
        omega1 = omega1 + beta
        residual = residual + horizontal_d(beta)
        steps += 1
        if steps > limit:
            raise NonDecomposable("integration by parts did not terminate")
    return SourceDecomposition(residual, omega1, "peel")


def source_decompose(dL: Form) -> SourceDecomposition:
    dec = peel(dL)
    if not dec.verify(dL):
        raise NonDecomposable("decomposition failed its exactness check")
    return dec


def source_coefficients(source: Form) -> List[Expr]:
    return [c for c in source.terms.values() if c.terms]


def euler_lagrange_system(L: LagrangianMultiform):
    """Rewrite system generated by the multiform Euler-Lagrange expressions."""
    from .rewrite import interreduce

    dec = source_decompose(delta_of_multiform(L))
    return interreduce(source_coefficients(dec.source), L.alg)


def euler_lagrange(L: LagrangianMultiform):
    """Generating set of the multiform Euler-Lagrange equations, solved for leading variables."""
    return euler_lagrange_system(L).equations()
