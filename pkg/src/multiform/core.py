"""Hamiltonian and symplectic multiforms built from a Lagrangian multiform and Ω⁽¹⁾."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .forms import Form, VerticalShift, horizontal_d, interior, vertical_delta
from .jet import Algebra, Expr
from .rewrite import Equation, RewriteSystem, interreduce
from .variational import (
    LagrangianMultiform,
    delta_of_multiform,
    euler_lagrange_system,
    source_coefficients,
    source_decompose,
)

Pair = Tuple[int, int]


def _function_value(w: Form) -> Expr:
    """Coefficient of a (0,0)-form."""
    return w.terms.get(((), ()), w.alg.zero())


def omega1_components(omega1: Form) -> Dict[int, Form]:
    """ω⁽¹⁾_j with Ω⁽¹⁾ = Σ_j ω⁽¹⁾_j ∧ dx^j."""
    return {j: omega1.horizontal_part((j,)) for j in range(omega1.alg.n)}


@dataclass
class HamiltonianMultiform:
    alg: Algebra
    coefficients: Dict[Pair, Expr]

    @property
    def n(self) -> int:
        return self.alg.n

    def H(self, i: int, j: int) -> Expr:
        if i == j:
            return self.alg.zero()
        if i > j:
            return -self.coefficients.get((j, i), self.alg.zero())
        return self.coefficients.get((i, j), self.alg.zero())

    def form(self) -> Form:
        return Form(self.alg, {((), p): e for p, e in self.coefficients.items() if e.terms})

    def __eq__(self, other):
        if not isinstance(other, HamiltonianMultiform):
            return NotImplemented
        keys = set(self.coefficients) | set(other.coefficients)
        return all(self.H(*k) == other.H(*k) for k in keys)


@dataclass
class SymplecticMultiform:
    """Ω = Σ_j ω_j ∧ dx^j."""

    alg: Algebra
    components: Dict[int, Form]

    @property
    def n(self) -> int:
        return self.alg.n

    def omega(self, j: int) -> Form:
        return self.components.get(j, Form.zero(self.alg))

    def form(self) -> Form:
        out = Form.zero(self.alg)
        for j, w in self.components.items():
            out = out + Form(self.alg, {(ds, (j,)): c for (ds, _), c in w.terms.items()})
        return out


def hamiltonian_multiform(L: LagrangianMultiform, omega1: Form) -> HamiltonianMultiform:
    """H_ij = ι_{∂̃i}ω⁽¹⁾_j − ι_{∂̃j}ω⁽¹⁾_i − L_ij."""
    comps = omega1_components(omega1)
    n = L.alg.n
    coeffs = {}
    for i in range(n):
        for j in range(i + 1, n):
            h = (
                _function_value(interior(VerticalShift(i), comps[j]))
                - _function_value(interior(VerticalShift(j), comps[i]))
                - L.L(i, j)
            )
            coeffs[(i, j)] = h
    return HamiltonianMultiform(L.alg, coeffs)


def symplectic_multiform(omega1: Form) -> SymplecticMultiform:
    return SymplecticMultiform(omega1.alg, {j: vertical_delta(w) for j, w in omega1_components(omega1).items()})


def hamilton_residuals(H: HamiltonianMultiform, Om: SymplecticMultiform) -> Dict[Pair, Form]:
    """δH_ij − ι_{∂̃j}ω_i + ι_{∂̃i}ω_j for each pair; zero on solutions."""
    out = {}
    for i in range(H.n):
        for j in range(i + 1, H.n):
            out[(i, j)] = (
                vertical_delta(Form.function(H.H(i, j)))
                - interior(VerticalShift(j), Om.omega(i))
                + interior(VerticalShift(i), Om.omega(j))
            )
    return out


def hamilton_equations_for_pair(H: HamiltonianMultiform, Om: SymplecticMultiform, i: int, j: int) -> RewriteSystem:
    res = hamilton_residuals(H, Om)[(min(i, j), max(i, j))]
    return interreduce(source_coefficients(res), H.alg)


def multiform_hamilton_system(H: HamiltonianMultiform, Om: SymplecticMultiform) -> RewriteSystem:
    exprs: List[Expr] = []
    for w in hamilton_residuals(H, Om).values():
        exprs.extend(source_coefficients(w))
    return interreduce(exprs, H.alg)


def multiform_hamilton_equations(H: HamiltonianMultiform, Om: SymplecticMultiform) -> List[Equation]:
    return multiform_hamilton_system(H, Om).equations()


def equivalent_systems(a: RewriteSystem, b: RewriteSystem) -> bool:
    """Each system's equations vanish on the other's shell."""
    return all(b.is_zero_on_shell(e.expr) for e in a.equations()) and all(
        a.is_zero_on_shell(e.expr) for e in b.equations()
    )


# ---------------------------------------------------------------------------
# structural checks


def spatial_constraints(rs: RewriteSystem, space: int = 0) -> List[Equation]:
    """Rules solving for a pure space derivative, i.e. constraints on initial data."""
    return [r.equation() for r in rs.rules if all(k == 0 for j, k in enumerate(r.lhs[2]) if j != space)]


@dataclass
class CheckReport:
    closure_L: bool
    theorem: bool
    closure_H: bool
    closure_Omega: bool
    gauge: bool
    seeds: List[int] = field(default_factory=list)
    equations: List[Equation] = field(default_factory=list)
    # on-shell normal forms of the closure identities (zero when they hold)
    residuals: Dict[str, Form] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.closure_L and self.theorem and self.closure_H and self.closure_Omega and self.gauge

    def as_dict(self) -> Dict[str, object]:
        return {
            "closure_L": self.closure_L,
            "theorem_dH_plus_2dL": self.theorem,
            "closure_H": self.closure_H,
            "closure_Omega": self.closure_Omega,
            "gauge": self.gauge,
            "seeds": list(self.seeds),
            "ok": self.ok,
        }


def gauge_check(L: LagrangianMultiform, omega1: Form, seed: int) -> bool:
    """ℋ(ℒ + dω, Ω⁽¹⁾ + δω) = ℋ(ℒ, Ω⁽¹⁾) for a random x-independent ω."""
    from .sampling import random_horizontal_one_form

    w = random_horizontal_one_form(L.alg, random.Random(seed))
    L2 = L + LagrangianMultiform.from_form(horizontal_d(w))
    return hamiltonian_multiform(L2, omega1 + vertical_delta(w)) == hamiltonian_multiform(L, omega1)


def check_multiform(
    L: LagrangianMultiform,
    omega1: Optional[Form] = None,
    seeds: Sequence[int] = (0, 1),
    rs: Optional[RewriteSystem] = None,
) -> CheckReport:
    if omega1 is None:
        omega1 = source_decompose(delta_of_multiform(L)).omega1
    if rs is None:
        rs = euler_lagrange_system(L)
    H = hamiltonian_multiform(L, omega1)
    Om = symplectic_multiform(omega1)
    dL = horizontal_d(L.form())
    dH = horizontal_d(H.form())
    res = {
        "closure_L": rs.normal_form(dL),
        "theorem_dH_plus_2dL": rs.normal_form(dH + dL * 2),
        "closure_H": rs.normal_form(dH),
        "closure_Omega": rs.normal_form(horizontal_d(Om.form())),
    }
    return CheckReport(
        closure_L=not res["closure_L"],
        theorem=not res["theorem_dH_plus_2dL"],
        closure_H=not res["closure_H"],
        closure_Omega=not res["closure_Omega"],
        gauge=all(gauge_check(L, omega1, s) for s in seeds),
        seeds=list(seeds),
        equations=rs.equations(),
        residuals=res,
    )


# ---------------------------------------------------------------------------
# bundled derivation


class Hierarchy:
    """ℒ together with everything derived from it, computed lazily."""

    def __init__(self, L: LagrangianMultiform, omega1: Optional[Form] = None, name: str = ""):
        self.L = L
        self.alg = L.alg
        self.name = name
        self._omega1 = omega1
        self._cache: Dict[str, object] = {}

    @classmethod
    def from_spec(cls, spec) -> "Hierarchy":
        return cls(spec.multiform(), spec.omega1, spec.name)

    def _get(self, key, make):
        if key not in self._cache:
            self._cache[key] = make()
        return self._cache[key]

    @property
    def decomposition(self):
        return self._get("dec", lambda: source_decompose(delta_of_multiform(self.L)))

    @property
    def omega1(self) -> Form:
        return self._omega1 if self._omega1 is not None else self.decomposition.omega1

    @property
    def rewrite_system(self) -> RewriteSystem:
        return self._get("rs", lambda: euler_lagrange_system(self.L))

    @property
    def hamiltonian(self) -> HamiltonianMultiform:
        return self._get("H", lambda: hamiltonian_multiform(self.L, self.omega1))

    @property
    def symplectic(self) -> SymplecticMultiform:
        return self._get("Om", lambda: symplectic_multiform(self.omega1))

    def check(self, seeds: Sequence[int] = (0, 1)) -> CheckReport:
        return check_multiform(self.L, self.omega1, seeds, self.rewrite_system)
