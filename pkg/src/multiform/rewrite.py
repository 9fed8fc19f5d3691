"""Oriented rewrite rules for computing modulo the equations of motion.

Each rule solves one equation for its leading jet variable.  A variable is
reducible when it is a derivative of some rule's lhs; its replacement is the
matching derivative of the rhs, itself reduced recursively.  Direction 0 plays
the role of space: variables are ordered first by their derivative count in
the other directions, so normal forms are expressed in pure space jets where
possible.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import NonOrientable
from .forms import Form, _acc, delta_of, wedge_all
from .jet import Algebra, Expr, Var, mono_degree

Key = Tuple[int, Tuple[int, ...], int]


def elimination_key(v: Var) -> Key:
    """Order on jet variables: non-space order, then multi-index lex, then field."""
    idx = v[2]
    return (sum(idx[1:]), idx, v[1])


@dataclass(frozen=True)
class Equation:
    """``lhs = rhs``; ``expr`` is lhs − rhs."""

    lhs: Expr
    rhs: Expr

    @property
    def expr(self) -> Expr:
        return self.lhs - self.rhs

    @classmethod
    def zero(cls, e: Expr) -> "Equation":
        return cls(e, e.alg.zero())

    def __str__(self):
        from .render import render_equation

        return render_equation(self.lhs, self.rhs)


@dataclass(frozen=True)
class RewriteRule:
    lhs: Var
    rhs: Expr

    def equation(self) -> Equation:
        return Equation(self.rhs.alg.var_expr(self.lhs), self.rhs)

    def __str__(self):
        from .render import render_expr

        return f"{self.rhs.alg.var_name(self.lhs)} -> {render_expr(self.rhs)}"


def _linear_constant_coefficient(e: Expr, v: Var):
    """Coefficient c if e = c·v + (terms free of v), else None."""
    coeff = None
    for m, c in e.terms.items():
        for w, k in m:
            if w == v:
                if k != 1 or len(m) != 1:
                    return None
                coeff = c
    return coeff


def orient_expr(e: Expr) -> RewriteRule:
    """Solve e = 0 for its maximal jet variable."""
    jets = [v for v in e.variables() if v[0] == 0]
    if not jets:
        raise NonOrientable(f"no jet variable in {e}")
    lead = max(jets, key=elimination_key)
    # generators hide their dependencies; the lead must not occur inside one
    for v in e.variables():
        if v[0] == 1 and lead in e.alg.generators[v[1]].partials:
            raise NonOrientable(f"leading variable of {e} occurs inside a generator")
    c = _linear_constant_coefficient(e, lead)
    if c is None:
        raise NonOrientable(f"leading variable {e.alg.var_name(lead)} is not linear with constant coefficient in {e}")
    rest = e - e.alg.var_expr(lead).scale(c)
    return RewriteRule(lead, rest.scale(-1 / c))


class RewriteSystem:
    """Rules plus a memoized table of reduced jet variables."""

    def __init__(self, alg: Algebra, rules: Sequence[RewriteRule]):
        self.alg = alg
        self.rules: Tuple[RewriteRule, ...] = tuple(rules)
        self._nf: Dict[Var, Optional[Expr]] = {}
        self._lock = threading.Lock()
        for r in self.rules:
            bad = [v for v in r.rhs.jet_dependencies() if elimination_key(v) >= elimination_key(r.lhs)]
            if bad:
                raise NonOrientable(f"rule {r} has a rhs variable not below its lhs")

    def __repr__(self):
        return "RewriteSystem([" + ", ".join(str(r) for r in self.rules) + "])"

    def equations(self) -> List[Equation]:
        return [r.equation() for r in self.rules]

    # ---- reduction --------------------------------------------------------
    def matching_rules(self, v: Var) -> List[Tuple[RewriteRule, Tuple[int, ...]]]:
        """Rules whose lhs v is a derivative of, with the remaining multi-index."""
        out = []
        if v[0] != 0:
            return out
        for r in self.rules:
            if r.lhs[1] == v[1] and all(a <= b for a, b in zip(r.lhs[2], v[2])):
                out.append((r, tuple(b - a for a, b in zip(r.lhs[2], v[2]))))
        return out

    def reduce_var(self, v: Var, rule_choice: int = 0) -> Optional[Expr]:
        """Normal form of a single variable, or None when it is irreducible."""
        if rule_choice == 0 and v in self._nf:
            return self._nf[v]
        matches = self.matching_rules(v)
        if not matches:
            res = None
        else:
            r, rest = matches[min(rule_choice, len(matches) - 1)]
            res = self.normal_form(r.rhs.multi_derivative(rest))
        if rule_choice == 0:
            with self._lock:
                self._nf.setdefault(v, res)
        return res

    def is_reducible(self, v: Var) -> bool:
        return bool(self.matching_rules(v))

    def normal_form(self, x: Union[Expr, Form]):
        if isinstance(x, Form):
            return self._normal_form_form(x)
        out = x
        # substitution can introduce new reducible variables through generators
        for _ in range(64):
            nxt = out.substitute(self.reduce_var)
            if nxt == out:
                return nxt
            out = nxt
        return out

    def _normal_form_form(self, w: Form) -> Form:
        alg = w.alg
        out: Dict = {}
        for (ds, xs), f in w.terms.items():
            f = self.normal_form(f)
            if not f.terms:
                continue
            if not any(self.is_reducible(v) for v in ds):
                _acc(out, (ds, xs), f)
                continue
            factors = []
            for v in ds:
                r = self.reduce_var(v)
                factors.append(Form.delta(alg, v) if r is None else delta_of(r))
            prod = wedge_all(factors)
            for (pds, _), c in prod.terms.items():
                _acc(out, (pds, xs), self.normal_form(c * f))
        return Form(alg, out)

    def is_zero_on_shell(self, x: Union[Expr, Form]) -> bool:
        return not self.normal_form(x).terms

    # ---- diagnostics ------------------------------------------------------
    def critical_variables(self, max_order: int) -> List[Var]:
        """Jet variables up to ``max_order`` reducible by two or more rules."""
        out = []
        n = self.alg.n
        for f in range(len(self.alg.fields)):
            for idx in _indices(n, max_order):
                v = (0, f, idx)
                if len(self.matching_rules(v)) > 1:
                    out.append(v)
        return out

    def check_confluence(self, max_order: int = 6) -> List[Var]:
        """Critical variables whose reductions disagree (empty when locally confluent)."""
        bad = []
        for v in self.critical_variables(max_order):
            paths = {self.reduce_var(v, k) for k in range(len(self.matching_rules(v)))}
            if len(paths) > 1:
                bad.append(v)
        return bad

    def measure(self, e: Expr) -> List[Key]:
        """Sorted multiset of elimination keys of reducible variables (descends under rewriting)."""
        ks = [elimination_key(v) for v in e.variables() if v[0] == 0 and self.is_reducible(v)]
        return sorted(ks, reverse=True)

    def rewrite_step(self, e: Expr) -> Expr:
        """Replace the single largest reducible variable by one rule application."""
        red = [v for v in e.variables() if v[0] == 0 and self.is_reducible(v)]
        if not red:
            return e
        v = max(red, key=elimination_key)
        r, rest = self.matching_rules(v)[0]
        rhs = r.rhs.multi_derivative(rest)
        return e.substitute(lambda w: rhs if w == v else None)


def _indices(n: int, max_order: int):
    if n == 0:
        yield ()
        return
    for k in range(max_order + 1):
        for tail in _indices(n - 1, max_order - k):
            yield (k,) + tail


def orient(equations: Iterable[Union[Equation, Expr]], alg: Optional[Algebra] = None) -> RewriteSystem:
    exprs = [eq.expr if isinstance(eq, Equation) else eq for eq in equations]
    if alg is None:
        if not exprs:
            raise ValueError("orient needs an algebra when no equations are given")
        alg = exprs[0].alg
    return RewriteSystem(alg, [orient_expr(e) for e in exprs if e.terms])


def normal_form(x, rs: RewriteSystem):
    return rs.normal_form(x)


def is_zero_on_shell(x, rs: RewriteSystem) -> bool:
    return rs.is_zero_on_shell(x)


def interreduce(exprs: Iterable[Expr], alg: Algebra) -> RewriteSystem:
    """Generating rule set: keep an expression only if the others do not already reduce it to 0."""
    pool = sorted(
        (e for e in exprs if e.terms),
        key=lambda e: (e.max_order(), len(e.terms), max(mono_degree(m) for m in e.terms), str(e)),
    )
    rules: List[RewriteRule] = []
    for e in pool:
        rs = RewriteSystem(alg, rules)
        r = rs.normal_form(e)
        if not r.terms:
            continue
        rules.append(orient_expr(r))
        # earlier rules may now simplify
        rules = _autoreduce(alg, rules)
    return RewriteSystem(alg, rules)


def _autoreduce(alg: Algebra, rules: List[RewriteRule]) -> List[RewriteRule]:
    changed = True
    while changed:
        changed = False
        for k, r in enumerate(rules):
            others = RewriteSystem(alg, rules[:k] + rules[k + 1:])
            if others.is_reducible(r.lhs):
                e = others.normal_form(r.equation().expr)
                rules = rules[:k] + rules[k + 1:] + ([orient_expr(e)] if e.terms else [])
                changed = True
                break
            rhs = others.normal_form(r.rhs)
            if rhs != r.rhs:
                rules[k] = RewriteRule(r.lhs, rhs)
                changed = True
                break
    return rules
