"""Hamiltonian forms, multi-time and single-time Poisson brackets, conservation laws.

A horizontal 1-form F = Σ F_j dx^j is Hamiltonian when a vertical field ξ
satisfies ι_ξ ω_j = δF_j for every j.  A 0-form H is Hamiltonian when
Σ_j ι_{ξ^{(j)}} ω_j = δH for vertical fields ξ^{(j)}, and then
ξ_H = Σ_j ξ^{(j)} ∧ ∂_j.  Both conditions are linear systems over the
polynomial algebra, solved in :mod:`multiform.linsolve`.
"""

from __future__ import annotations

import copy
import itertools
import time
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .core import Hierarchy, HamiltonianMultiform, SymplecticMultiform
from .errors import MultiformError, NotHamiltonian, NotHamiltonianAt
from .forms import Form, MultiVectorField, horizontal_d, interior, vertical_delta
from .jet import Algebra, Expr, Monomial, Var, mono_divides, mono_sort_key
from .linsolve import LinExpr, ScalarSystem, solve_over_algebra
from .rewrite import RewriteSystem, elimination_key

# ---------------------------------------------------------------------------
# the linear system ι_ξ ω = δF


def contraction_rows(w: Form) -> Dict[Var, Dict[Var, Expr]]:
    """rows[y][x] = coefficient of δy in ι_{∂x} w, for a vertical 2-form w."""
    rows: Dict[Var, Dict[Var, Expr]] = {}
    for (ds, xs), c in w.terms.items():
        if len(ds) != 2 or xs:
            raise ValueError("expected a vertical 2-form")
        a, b = ds
        # ι_{∂a}(c δa∧δb) = c δb,  ι_{∂b}(c δa∧δb) = −c δa
        ra = rows.setdefault(b, {})
        ra[a] = ra[a] + c if a in ra else c
        rb = rows.setdefault(a, {})
        rb[b] = rb[b] - c if b in rb else -c
    return rows


def _var_order(v: Var):
    return (v[1], elimination_key(v))


def symplectic_variables(w: Form) -> List[Var]:
    return sorted(w.delta_vars(), key=_var_order)


def _lin_partial(F: LinExpr, y: Var) -> LinExpr:
    return F.map(lambda e: e.partial(y))


def _lin_dependencies(F: LinExpr) -> set:
    out = set()
    for e in F.terms.values():
        out |= e.jet_dependencies()
    return out


def _as_lin(alg: Algebra, F) -> LinExpr:
    return F if isinstance(F, LinExpr) else LinExpr.constant(F)


def solve_one_form(Om: SymplecticMultiform, comps: Dict[int, LinExpr]):
    """Vertical ξ with ι_ξ ω_j = δF_j for each j (F_j possibly parametric)."""
    alg = Om.alg
    unknowns: List[Var] = sorted({v for w in Om.components.values() for v in w.delta_vars()}, key=_var_order)
    rows, rhs, tags = [], [], []
    for j in range(Om.n):
        F = comps.get(j, LinExpr(alg))
        crow = contraction_rows(Om.omega(j))
        ys = set(crow) | _lin_dependencies(F)
        for y in sorted(ys, key=_var_order):
            rows.append(crow.get(y, {}))
            rhs.append(_lin_partial(F, y))
            tags.append((j, y))
    return solve_over_algebra(alg, rows, rhs, unknowns), unknowns


def solve_zero_form(Om: SymplecticMultiform, H: LinExpr):
    """ξ^{(j)} with Σ_j ι_{ξ^{(j)}} ω_j = δH."""
    alg = Om.alg
    unknowns: List[Tuple[int, Var]] = []
    merged: Dict[Var, Dict[Tuple[int, Var], Expr]] = {}
    for j in range(Om.n):
        for y, r in contraction_rows(Om.omega(j)).items():
            dst = merged.setdefault(y, {})
            for x, c in r.items():
                dst[(j, x)] = c
        unknowns.extend((j, x) for x in symplectic_variables(Om.omega(j)))
    ys = set(merged) | _lin_dependencies(H)
    order = sorted(ys, key=_var_order)
    rows = [merged.get(y, {}) for y in order]
    rhs = [_lin_partial(H, y) for y in order]
    return solve_over_algebra(alg, rows, rhs, unknowns), unknowns


# ---------------------------------------------------------------------------
# Hamiltonian forms


@dataclass
class HamiltonianForm:
    form: Form
    degree: int
    vectorfield: MultiVectorField
    kernel: List[MultiVectorField] = field(default_factory=list)

    def component(self, j: int) -> Expr:
        return self.form.coefficient((), (j,))

    def value(self) -> Expr:
        return self.form.coefficient((), ())


def _form_degree(F: Form) -> int:
    degs = {(len(ds), len(xs)) for (ds, xs) in F.terms}
    if len(degs) > 1 or degs - {(0, 0), (0, 1)}:
        raise ValueError("Hamiltonian forms are horizontal 0- or 1-forms")
    return degs.pop()[1] if degs else 0


def _certificate(sol) -> str:
    from .render import render_expr

    for c in sol.consistency:
        e = c.terms.get(None)
        if e is not None:
            return f"{render_expr(e)} = 0"
    return "inconsistent linear relation"


def hamiltonian_vector_field(F: Form, Om: SymplecticMultiform, degree: Optional[int] = None) -> HamiltonianForm:
    alg = Om.alg
    deg = _form_degree(F) if degree is None else degree
    if deg == 1:
        comps = {j: LinExpr.constant(F.coefficient((), (j,))) for j in range(Om.n)}
        sol, unknowns = solve_one_form(Om, comps)
        if not sol.is_consistent():
            raise NotHamiltonian("no vertical field solves the Hamiltonian condition", _certificate(sol))
        xi = MultiVectorField.vertical(alg, {x: e.evaluate({}) for x, e in sol.solution.items()})
        kernel = [MultiVectorField.vertical(alg, k) for k in sol.kernel]
    else:
        H = LinExpr.constant(F.coefficient((), ()))
        sol, unknowns = solve_zero_form(Om, H)
        if not sol.is_consistent():
            raise NotHamiltonian("no bivector solves the Hamiltonian condition", _certificate(sol))
        xi = MultiVectorField.bivector(alg, {(x, j): e.evaluate({}) for (j, x), e in sol.solution.items()})
        kernel = [MultiVectorField.bivector(alg, {(x, j): c for (j, x), c in k.items()}) for k in sol.kernel]
    hf = HamiltonianForm(F, deg, xi, kernel)
    if interior(xi, Om.form()) != vertical_delta(F):
        raise MultiformError("internal error: Hamiltonian vector field fails ι_ξΩ = δF")
    return hf


def is_hamiltonian(F: Form, Om: SymplecticMultiform):
    """(True, HamiltonianForm) or (False, certificate)."""
    try:
        return True, hamiltonian_vector_field(F, Om)
    except NotHamiltonian as exc:
        return False, exc.certificate


def one_form(alg: Algebra, comps: Dict[int, Expr]) -> Form:
    return Form(alg, {((), (j,)): e for j, e in comps.items() if e.terms})


# ---------------------------------------------------------------------------
# brackets


def multitime_bracket(P: HamiltonianForm, Q: HamiltonianForm) -> Form:
    """{|P,Q|} = (−1)^r ι_{ξ_P} δQ with r the degree of P."""
    val = interior(P.vectorfield, vertical_delta(Q.form))
    return -val if P.degree % 2 else val


def covariant_bracket(P: HamiltonianForm, Q: HamiltonianForm, Om: SymplecticMultiform) -> Form:
    """(−1)^r ι_{ξ_P} ι_{ξ_Q} Ω; agrees with the multi-time bracket when n = 2."""
    val = interior(P.vectorfield, interior(Q.vectorfield, Om.form()))
    return -val if P.degree % 2 else val


def single_time_vector_field(f: Expr, i: int, Om: SymplecticMultiform) -> MultiVectorField:
    sol, _ = solve_one_form(restrict_to_direction(Om, i), {i: LinExpr.constant(f)})
    if not sol.is_consistent():
        raise NotHamiltonianAt(i, f"not Hamiltonian for the structure in direction {Om.alg.labels[i]}", _certificate(sol))
    return MultiVectorField.vertical(Om.alg, {x: e.evaluate({}) for x, e in sol.solution.items()})


def restrict_to_direction(Om: SymplecticMultiform, i: int) -> SymplecticMultiform:
    return SymplecticMultiform(Om.alg, {i: Om.omega(i)})


def single_time_bracket(f: Expr, g: Expr, i: int, Om: SymplecticMultiform) -> Expr:
    """{f,g}_i = −ι_ξ δg where ι_ξ ω_i = δf."""
    xi = single_time_vector_field(f, i, Om)
    return -xi.apply(g)


@dataclass
class DecompositionReport:
    holds: bool
    lhs: Form
    rhs: Form
    xi_serves_each_component: bool


def decomposition_check(P: Form, Q: Form, Om: SymplecticMultiform) -> DecompositionReport:
    """{|P,Q|} against Σ_i {P_i,Q_i}_i dx^i."""
    alg = Om.alg
    hp = hamiltonian_vector_field(P, Om, 1)
    hq = hamiltonian_vector_field(Q, Om, 1)
    lhs = multitime_bracket(hp, hq)
    comps = {}
    serves = True
    for i in range(Om.n):
        Pi, Qi = P.coefficient((), (i,)), Q.coefficient((), (i,))
        comps[i] = single_time_bracket(Pi, Qi, i, Om)
        # ξ_P also solves the single-time condition for P_i
        if interior(hp.vectorfield, Om.omega(i)) != vertical_delta(Form.function(Pi)):
            serves = False
    rhs = one_form(alg, comps)
    return DecompositionReport(lhs == rhs, lhs, rhs, serves)


# ---------------------------------------------------------------------------
# conservation laws


@dataclass
class ConservationReport:
    closed_on_shell: bool
    hamiltonian: bool
    via_bracket: Optional[bool] = None

    @property
    def conserved(self) -> bool:
        return self.closed_on_shell


def conservation_report(
    F: Form, H: HamiltonianMultiform, rs: RewriteSystem, Om: Optional[SymplecticMultiform] = None
) -> ConservationReport:
    closed = rs.is_zero_on_shell(horizontal_d(F))
    if Om is None:
        return ConservationReport(closed, False)
    ok, hf = is_hamiltonian(F, Om)
    if not ok:
        return ConservationReport(closed, False)
    # dF = ι_{ξ_F} δℋ on shell for Hamiltonian F
    via = rs.is_zero_on_shell(interior(hf.vectorfield, vertical_delta(H.form())))
    if via != closed:
        raise MultiformError("dF and ι_{ξ_F}δℋ disagree on shell")
    return ConservationReport(closed, True, via)


def hamilton_identity_residual(hf: HamiltonianForm, H: HamiltonianMultiform, rs: RewriteSystem) -> Form:
    """On-shell normal form of dF − ι_{ξ_F}δℋ for a Hamiltonian 1-form F."""
    return rs.normal_form(horizontal_d(hf.form) - interior(hf.vectorfield, vertical_delta(H.form())))


def conservation_check(F: Form, H: HamiltonianMultiform, rs: RewriteSystem, Om: Optional[SymplecticMultiform] = None) -> bool:
    return conservation_report(F, H, rs, Om).conserved


@dataclass(frozen=True)
class AnsatzSpec:
    max_order: int
    max_degree: int
    mode: str = "hamiltonian"

    def __post_init__(self):
        if self.mode not in ("hamiltonian", "closed"):
            raise ValueError(f"unknown search mode {self.mode!r}")


def _monomials(alg: Algebra, variables: Sequence[Var], max_degree: int) -> List[Monomial]:
    """Monomials of degree 1..max_degree, skipping those reducible by generator relations."""
    rel = [r.lhs for r in alg.relations]
    out = []
    for d in range(1, max_degree + 1):
        for combo in itertools.combinations_with_replacement(sorted(variables), d):
            m: Dict[Var, int] = {}
            for v in combo:
                m[v] = m.get(v, 0) + 1
            mono = tuple(sorted(m.items()))
            if any(mono_divides(r, mono) for r in rel):
                continue
            out.append(mono)
    return sorted(out, key=mono_sort_key)


def _generators_over(alg: Algebra, allowed: set) -> List[Var]:
    out = []
    for g, gen in enumerate(alg.generators):
        if gen.partials and set(gen.partials) <= allowed:
            out.append((1, g, ()))
    return out


def _jet_order(v: Var) -> int:
    return sum(v[2])


@dataclass
class SearchResult:
    laws: List[Form]
    trivial_space: ScalarSystem
    rewrite_system: Optional[RewriteSystem]
    unknowns: int
    seconds: float

    def _prepare(self, F: Form) -> Form:
        return F if self.rewrite_system is None else self.rewrite_system.normal_form(F)

    def contains(self, F: Form) -> bool:
        """F lies in span(laws) modulo constants and exact forms."""
        return in_span(self._prepare(F), self.laws, self.trivial_space)

    def is_trivial(self, F: Form) -> bool:
        return in_span(self._prepare(F), [], self.trivial_space)


def _form_vector(F: Form) -> Dict[Hashable, object]:
    out = {}
    for (ds, xs), c in F.terms.items():
        for m, k in c.terms.items():
            out[(xs, m)] = k
    return out


def in_span(F: Form, basis: Sequence[Form], trivial: ScalarSystem) -> bool:
    sys_ = copy.deepcopy(trivial)
    for b in basis:
        sys_.add(_form_vector(b))
    return not sys_._reduce(_form_vector(F))


def _irreducible_variables(alg: Algebra, rs: RewriteSystem, max_order: int) -> List[Var]:
    from .sampling import jet_variables

    vs = [v for v in jet_variables(alg, max_order) if not rs.is_reducible(v)]
    return vs + _generators_over(alg, set(vs))


def _trivial_space(alg: Algebra, rs: Optional[RewriteSystem], variables: Sequence[Var], max_degree: int) -> ScalarSystem:
    """Span of constant 1-forms and dG for monomial 0-forms G (reduced on shell when rs is given)."""
    sys_ = ScalarSystem()
    for j in range(alg.n):
        sys_.add({((j,), ()): 1})
    for m in _monomials(alg, variables, max_degree):
        G = Expr(alg, alg.normalize({m: 1}))
        dG = horizontal_d(Form.function(G))
        sys_.add(_form_vector(dG if rs is None else rs.normal_form(dG)))
    return sys_


def _ansatz(alg: Algebra, allowed: Dict[int, List[Var]], max_degree: int):
    """F_j = Σ_m c_{j,m} m over monomials in the allowed variables."""
    params: List[Tuple[int, Monomial]] = []
    comps: Dict[int, LinExpr] = {}
    mono_cache: Dict[frozenset, List[Monomial]] = {}
    for j in range(alg.n):
        key = frozenset(allowed[j])
        if key not in mono_cache:
            mono_cache[key] = _monomials(alg, allowed[j], max_degree)
        terms = {}
        for m in mono_cache[key]:
            p = (j, m)
            params.append(p)
            terms[p] = Expr(alg, alg.normalize({m: 1}))
        comps[j] = LinExpr(alg, terms)
    return params, comps


def _symplectic_allowed(Om: SymplecticMultiform, max_order: int) -> Dict[int, List[Var]]:
    """Per component, the variables a Hamiltonian F_j may depend on: those paired in ω_j."""
    alg = Om.alg
    out = {}
    for j in range(alg.n):
        vs = [v for v in Om.omega(j).delta_vars() if _jet_order(v) <= max_order]
        out[j] = vs + _generators_over(alg, set(vs))
    return out


def _vector_to_form(alg: Algebra, vec: Dict) -> Form:
    F = Form.zero(alg)
    for (j, m), c in vec.items():
        F = F + Form.monomial(Expr(alg, alg.normalize({m: c})), (), (j,))
    return F


def hamiltonian_form_basis(Om: SymplecticMultiform, max_order: int, max_degree: int) -> List[Form]:
    """Basis of the polynomial Hamiltonian 1-forms within the given bounds (no constants)."""
    alg = Om.alg
    params, comps = _ansatz(alg, _symplectic_allowed(Om, max_order), max_degree)
    system = ScalarSystem(params)
    sol, _ = solve_one_form(Om, comps)
    for c in sol.consistency:
        for row in c.scalar_equations():
            system.add(row)
    return [_vector_to_form(alg, vec) for vec in system.nullspace(params)]


def conservation_search(spec: AnsatzSpec, hier: Hierarchy) -> SearchResult:
    t0 = time.time()
    alg = hier.alg
    rs = hier.rewrite_system
    Om = hier.symplectic
    if spec.mode == "hamiltonian":
        allowed = _symplectic_allowed(Om, spec.max_order)
    else:
        irr = _irreducible_variables(alg, rs, spec.max_order)
        allowed = {j: irr for j in range(alg.n)}
    params, comps = _ansatz(alg, allowed, spec.max_degree)

    system = ScalarSystem(params)
    if spec.mode == "hamiltonian":
        sol, _ = solve_one_form(Om, comps)
        for c in sol.consistency:
            for row in c.scalar_equations():
                system.add(row)
        H = hier.hamiltonian
        for (i, j), Hij in H.coefficients.items():
            # {|H_ij, F|} = ξ_F(H_ij), required to vanish on shell
            val = LinExpr(alg)
            for x, lin in sol.solution.items():
                dH = Hij.partial(x)
                if dH.terms:
                    val = val + lin.mul(dH)
            val = val.map(rs.normal_form)
            for row in val.scalar_equations():
                system.add(row)
    else:
        nf_cache: Dict[Tuple[int, Monomial], Expr] = {}

        def dnf(i: int, m: Monomial) -> Expr:
            k = (i, m)
            if k not in nf_cache:
                nf_cache[k] = rs.normal_form(Expr(alg, alg.normalize({m: 1})).total_derivative(i))
            return nf_cache[k]

        for a in range(alg.n):
            for b in range(a + 1, alg.n):
                # coefficient of dx^{ab} in dF is ∂_a F_b − ∂_b F_a
                terms = {}
                for (j, m) in params:
                    if j == b:
                        terms[(j, m)] = dnf(a, m)
                    elif j == a:
                        terms[(j, m)] = -dnf(b, m)
                val = LinExpr(alg, terms)
                for row in val.scalar_equations():
                    system.add(row)

    basis = system.nullspace(params)
    # Hamiltonian forms are off-shell objects; closed forms are only defined on shell
    if spec.mode == "hamiltonian":
        shell = None
        gvars = sorted({v for vs in allowed.values() for v in vs})
    else:
        shell = rs
        gvars = _irreducible_variables(alg, rs, spec.max_order)
    trivial = _trivial_space(alg, shell, gvars, spec.max_degree)
    seen = copy.deepcopy(trivial)
    laws = []
    for vec in basis:
        F = _vector_to_form(alg, vec)
        if seen.add(_form_vector(F if shell is None else shell.normal_form(F))):
            laws.append(F)
    return SearchResult(laws, trivial, shell, len(params), time.time() - t0)
