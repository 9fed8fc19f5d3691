"""Linear algebra over the scalars and over the differential algebra.

``ScalarSystem`` is a sparse incremental row-echelon solver for equations in
named unknowns with Gaussian-rational coefficients.  ``solve_over_algebra``
solves ``A ξ = b`` where A has polynomial entries and b may depend linearly on
ansatz parameters (a ``LinExpr``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .errors import NonPolynomialSolution
from .jet import Algebra, Expr, mono_div, mono_divides
from .scalar import Scalar, as_scalar, mpq

_ONE = mpq(1)

Param = Hashable


# ---------------------------------------------------------------------------
# scalar systems


class ScalarSystem:
    """Sparse equations Σ c_k x_k = 0 kept in reduced echelon form."""

    def __init__(self, order: Optional[Sequence[Param]] = None):
        self._rank: Dict[Param, int] = {p: k for k, p in enumerate(order or ())}
        self.pivots: Dict[Param, Dict[Param, Scalar]] = {}
        self.inconsistent = False

    def _key(self, p: Param):
        return (self._rank.get(p, len(self._rank)), repr(p))

    def _reduce(self, row: Dict[Param, Scalar]) -> Dict[Param, Scalar]:
        row = dict(row)
        # substitute pivot rows; each pivot row is monic in its pivot and free of other pivots
        for p in [q for q in row if q in self.pivots]:
            c = row.pop(p, None)
            if c is None:
                continue
            for q, v in self.pivots[p].items():
                if q == p:
                    continue
                nv = row.get(q, 0) - c * v
                if nv:
                    row[q] = nv
                else:
                    row.pop(q, None)
        return row

    def add(self, row: Dict[Param, Scalar]) -> bool:
        """Add an equation; returns True when it was independent."""
        row = self._reduce({k: as_scalar(v) for k, v in row.items() if v})
        if not row:
            return False
        if list(row) == [None]:
            self.inconsistent = True
            return False
        piv = min((p for p in row if p is not None), key=self._key)
        inv = _ONE / row[piv]
        row = {q: v * inv for q, v in row.items()}
        # keep reduced form: clear piv from existing pivot rows
        for p, prow in self.pivots.items():
            c = prow.get(piv)
            if c is None:
                continue
            for q, v in row.items():
                if q == piv:
                    continue
                nv = prow.get(q, 0) - c * v
                if nv:
                    prow[q] = nv
                else:
                    prow.pop(q, None)
            del prow[piv]
        self.pivots[piv] = row
        return True

    def rank(self) -> int:
        return len(self.pivots)

    def nullspace(self, unknowns: Iterable[Param]) -> List[Dict[Param, Scalar]]:
        """Basis of solutions (homogeneous part) over the given unknowns."""
        free = [u for u in unknowns if u not in self.pivots]
        basis = []
        for f in free:
            vec = {f: mpq(1)}
            for p, prow in self.pivots.items():
                c = prow.get(f)
                if c:
                    vec[p] = -c
            basis.append(vec)
        return basis

    def particular(self) -> Dict[Param, Scalar]:
        """Solution with free unknowns zero (constant column keyed by None)."""
        return {p: -prow.get(None, 0) for p, prow in self.pivots.items() if prow.get(None)}


def expr_equations(e: Expr) -> List[Tuple[Hashable, Scalar]]:
    return list(e.terms.items())


# ---------------------------------------------------------------------------
# parameter-linear expressions


class LinExpr:
    """Σ_k c_k E_k + E_0 with unknown scalars c_k and Expr coefficients E_k (key None = E_0)."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: Algebra, terms: Optional[Dict[Param, Expr]] = None):
        self.alg = alg
        self.terms: Dict[Param, Expr] = {k: v for k, v in (terms or {}).items() if v.terms}

    @classmethod
    def constant(cls, e: Expr) -> "LinExpr":
        return cls(e.alg, {None: e})

    def __add__(self, other: "LinExpr") -> "LinExpr":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return LinExpr(self.alg, out)

    def __neg__(self):
        return LinExpr(self.alg, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def mul(self, e: Expr) -> "LinExpr":
        if not e.terms:
            return LinExpr(self.alg)
        if e.is_constant():
            c = e.constant_value()
            return LinExpr(self.alg, {k: v.scale(c) for k, v in self.terms.items()})
        return LinExpr(self.alg, {k: v * e for k, v in self.terms.items()})

    def map(self, f) -> "LinExpr":
        return LinExpr(self.alg, {k: f(v) for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, values: Dict[Param, Scalar]) -> Expr:
        out = self.alg.zero()
        for k, v in self.terms.items():
            if k is None:
                out = out + v
            else:
                c = values.get(k, 0)
                if c:
                    out = out + v.scale(c)
        return out

    def scalar_equations(self) -> List[Dict[Param, Scalar]]:
        """One equation per monomial for LinExpr ≡ 0."""
        rows: Dict = {}
        for k, v in self.terms.items():
            for m, c in v.terms.items():
                rows.setdefault(m, {})[k] = c
        return list(rows.values())


# ---------------------------------------------------------------------------
# systems over the algebra


def exact_divide(num: Expr, den: Expr) -> Expr:
    """num / den when den is a single term dividing every term of num."""
    if den.is_constant():
        return num.scale(1 / den.constant_value())
    if len(den.terms) != 1:
        raise NonPolynomialSolution(f"cannot divide by {den}")
    (dm, dc), = den.terms.items()
    out = {}
    for m, c in num.terms.items():
        if not mono_divides(dm, m):
            raise NonPolynomialSolution(f"{den} does not divide {num}")
        out[mono_div(m, dm)] = c / dc
    return Expr(num.alg, out)


@dataclass
class AlgebraSolution:
    """ξ with A ξ = b, given consistency conditions."""

    solution: Dict[Hashable, LinExpr]
    consistency: List[LinExpr]
    kernel: List[Dict[Hashable, Expr]] = field(default_factory=list)

    def is_consistent(self) -> bool:
        return all(c.is_zero() for c in self.consistency)


def solve_over_algebra(
    alg: Algebra,
    rows: Sequence[Dict[Hashable, Expr]],
    rhs: Sequence[LinExpr],
    unknowns: Sequence[Hashable],
) -> AlgebraSolution:
    rank = {u: k for k, u in enumerate(unknowns)}
    work = [(dict((k, v) for k, v in r.items() if v.terms), b) for r, b in zip(rows, rhs)]
    pivots: List[Tuple[Hashable, Dict[Hashable, Expr], LinExpr]] = []
    while True:
        best = None
        for ri, (r, _) in enumerate(work):
            for u, a in r.items():
                key = (0 if a.is_constant() else 1, len(a.terms), rank[u], ri)
                if best is None or key < best[0]:
                    best = (key, ri, u)
        if best is None:
            break
        _, ri, u = best
        prow, pb = work.pop(ri)
        p = prow[u]
        const = p.is_constant()
        nxt = []
        for r, b in work:
            a = r.get(u)
            if a is None:
                nxt.append((r, b))
                continue
            if const:
                f = a.scale(1 / p.constant_value())
                nr = dict(r)
                for k, v in prow.items():
                    nv = nr.get(k, alg.zero()) - f * v
                    if nv.terms:
                        nr[k] = nv
                    else:
                        nr.pop(k, None)
                nb = b - pb.mul(f)
            else:
                nr = {}
                for k in set(r) | set(prow):
                    nv = r.get(k, alg.zero()) * p - prow.get(k, alg.zero()) * a
                    if nv.terms:
                        nr[k] = nv
                nb = b.mul(p) - pb.mul(a)
            nxt.append((nr, nb))
        work = nxt
        pivots.append((u, prow, pb))
    consistency = [b for r, b in work if not b.is_zero()]
    sol: Dict[Hashable, LinExpr] = {}
    for u, prow, pb in reversed(pivots):
        acc = pb
        for k, a in prow.items():
            if k != u and k in sol:
                acc = acc - sol[k].mul(a)
        p = prow[u]
        sol[u] = acc.map(lambda e: exact_divide(e, p))
    kernel = []
    pivot_cols = {u for u, _, _ in pivots}
    for f in unknowns:
        if f in pivot_cols:
            continue
        vec: Dict[Hashable, Expr] = {f: alg.one()}
        try:
            for u, prow, _ in reversed(pivots):
                acc = alg.zero()
                for k, a in prow.items():
                    if k != u and k in vec:
                        acc = acc - vec[k] * a
                if acc.terms:
                    vec[u] = exact_divide(acc, prow[u])
        except NonPolynomialSolution:
            continue
        kernel.append(vec)
    return AlgebraSolution(sol, consistency, kernel)
