"""(p,q)-forms over the jet algebra, the bicomplex differentials and interior products.

A basis element is written with all vertical factors first:
``δa_1 ∧ … ∧ δa_p ∧ dx^{j_1} ∧ … ∧ dx^{j_q}`` and stored as the key
``(deltas, dxs)`` with both tuples strictly increasing.  Reordering signs go
into the coefficient.
"""

from __future__ import annotations

from typing import Dict, Iterable, Optional, Sequence, Tuple

from .errors import AlgebraError
from .jet import Algebra, Expr, Var, shift
from .scalar import is_scalar

Key = Tuple[Tuple[Var, ...], Tuple[int, ...]]


def sort_with_sign(items: Sequence) -> Optional[Tuple[tuple, int]]:
    """Sort anticommuting symbols; None if a symbol repeats."""
    lst = list(items)
    sign = 1
    for i in range(1, len(lst)):
        j = i
        while j > 0 and lst[j - 1] > lst[j]:
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and lst[j - 1] == lst[j]:
            return None
    for a, b in zip(lst, lst[1:]):
        if a == b:
            return None
    return tuple(lst), sign


def _acc(terms: Dict[Key, Expr], key: Key, coeff: Expr) -> None:
    if not coeff.terms:
        return
    cur = terms.get(key)
    if cur is None:
        terms[key] = coeff
    else:
        s = cur + coeff
        if s.terms:
            terms[key] = s
        else:
            del terms[key]


class Form:
    """Finite sum of Expr-coefficient wedge monomials in δ- and dx-generators."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: Algebra, terms: Optional[Dict[Key, Expr]] = None):
        self.alg = alg
        self.terms: Dict[Key, Expr] = {k: v for k, v in (terms or {}).items() if v.terms}

    # ---- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, alg: Algebra) -> "Form":
        return cls(alg, {})

    @classmethod
    def function(cls, e: Expr) -> "Form":
        return cls(e.alg, {((), ()): e})

    @classmethod
    def dx(cls, alg: Algebra, *positions: int) -> "Form":
        s = sort_with_sign(positions)
        if s is None:
            return cls(alg)
        return cls(alg, {((), s[0]): alg.const(s[1])})

    @classmethod
    def delta(cls, alg: Algebra, *vars_: Var) -> "Form":
        s = sort_with_sign(vars_)
        if s is None:
            return cls(alg)
        return cls(alg, {(s[0], ()): alg.const(s[1])})

    @classmethod
    def monomial(cls, coeff: Expr, deltas: Sequence[Var] = (), dxs: Sequence[int] = ()) -> "Form":
        """coeff · δdeltas[0] ∧ … ∧ dx^{dxs[0]} ∧ …, reordered into canonical form."""
        alg = coeff.alg
        sd = sort_with_sign(deltas)
        sx = sort_with_sign(dxs)
        if sd is None or sx is None:
            return cls(alg)
        return cls(alg, {(sd[0], sx[0]): coeff.scale(sd[1] * sx[1]) if sd[1] * sx[1] != 1 else coeff})

    # ---- algebra ------------------------------------------------------------
    def _check(self, other: "Form") -> None:
        if other.alg is not self.alg:
            raise AlgebraError("mixing forms from different algebras")

    def __add__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            _acc(out, k, v)
        return Form(self.alg, out)

    def __neg__(self):
        return Form(self.alg, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        """Multiply every coefficient by a scalar or an Expr (a 0-form)."""
        if isinstance(other, Expr) or is_scalar(other):
            return Form(self.alg, {k: v * other for k, v in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.alg is other.alg and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        from .render import render_form

        return f"Form({render_form(self)})"

    def __str__(self):
        from .render import render_form

        return render_form(self)

    # ---- structure ------------------------------------------------------------
    def bidegrees(self) -> set:
        return {(len(d), len(x)) for d, x in self.terms}

    def bidegree(self) -> Tuple[int, int]:
        b = self.bidegrees()
        if len(b) > 1:
            raise AlgebraError(f"form mixes bidegrees {sorted(b)}")
        return b.pop() if b else (0, 0)

    def coefficient(self, deltas: Sequence[Var] = (), dxs: Sequence[int] = ()) -> Expr:
        """Coefficient of the basis element written in the given order."""
        sd = sort_with_sign(deltas)
        sx = sort_with_sign(dxs)
        if sd is None or sx is None:
            return self.alg.zero()
        c = self.terms.get((sd[0], sx[0]))
        if c is None:
            return self.alg.zero()
        return c.scale(sd[1] * sx[1]) if sd[1] * sx[1] != 1 else c

    def horizontal_part(self, dxs: Sequence[int]) -> "Form":
        """Vertical form multiplying dx^{dxs} (the factor is dropped)."""
        sx = sort_with_sign(dxs)
        if sx is None:
            return Form(self.alg)
        out = {}
        for (d, x), c in self.terms.items():
            if x == sx[0]:
                out[(d, ())] = c.scale(sx[1]) if sx[1] != 1 else c
        return Form(self.alg, out)

    def map_coefficients(self, f) -> "Form":
        out: Dict[Key, Expr] = {}
        for k, c in self.terms.items():
            _acc(out, k, f(c))
        return Form(self.alg, out)

    def delta_vars(self) -> set:
        return {v for d, _ in self.terms for v in d}

    def jet_dependencies(self) -> set:
        out = set(self.delta_vars())
        for c in self.terms.values():
            out |= c.jet_dependencies()
        return out


# ---------------------------------------------------------------------------
# exterior algebra


def wedge(a: Form, b: Form) -> Form:
    a._check(b)
    out: Dict[Key, Expr] = {}
    for (da, xa), ca in a.terms.items():
        for (db, xb), cb in b.terms.items():
            sd = sort_with_sign(da + db)
            if sd is None:
                continue
            sx = sort_with_sign(xa + xb)
            if sx is None:
                continue
            sign = sd[1] * sx[1] * (-1 if (len(xa) * len(db)) % 2 else 1)
            c = ca * cb
            _acc(out, (sd[0], sx[0]), c if sign == 1 else -c)
    return Form(a.alg, out)


def wedge_all(forms: Iterable[Form]) -> Form:
    forms = list(forms)
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


# ---------------------------------------------------------------------------
# differentials


def horizontal_d(w: Form) -> Form:
    """d: (p,q) -> (p,q+1), with d(δu^{(i)}) = -Σ_j δu^{(i)+e_j} ∧ dx^j."""
    alg = w.alg
    out: Dict[Key, Expr] = {}
    for (ds, xs), f in w.terms.items():
        p = len(ds)
        sp = -1 if p % 2 else 1
        for j in range(alg.n):
            if j in xs:
                continue
            sx = sort_with_sign((j,) + xs)
            sgn = sp * sx[1]
            # df ∧ δA ∧ dxA = (-1)^p δA ∧ dx^j ∧ dxA
            fj = f.total_derivative(j)
            if fj.terms:
                _acc(out, (ds, sx[0]), fj if sgn == 1 else -fj)
            # f d(δA) ∧ dxA = (-1)^p Σ_k f δa_1..δa_k^{+e_j}..δa_p ∧ dx^j ∧ dxA
            for k, v in enumerate(ds):
                vj = (0, v[1], shift(v[2], j))
                sd = sort_with_sign(ds[:k] + (vj,) + ds[k + 1:])
                if sd is None:
                    continue
                s = sgn * sd[1]
                _acc(out, (sd[0], sx[0]), f if s == 1 else -f)
    return Form(alg, out)


def vertical_delta(w: Form) -> Form:
    """δ: (p,q) -> (p+1,q); δ kills δ- and dx-generators."""
    alg = w.alg
    out: Dict[Key, Expr] = {}
    for (ds, xs), f in w.terms.items():
        for x in f.jet_dependencies():
            if x in ds:
                continue
            fx = f.partial(x)
            if not fx.terms:
                continue
            sd = sort_with_sign((x,) + ds)
            _acc(out, (sd[0], xs), fx if sd[1] == 1 else -fx)
    return Form(alg, out)


def delta_of(e: Expr) -> Form:
    return vertical_delta(Form.function(e))


def d_of(e: Expr) -> Form:
    return horizontal_d(Form.function(e))


# ---------------------------------------------------------------------------
# vector fields and interior products


def _interior_vertical(w_terms: Dict[Key, Expr], x: Var, out: Dict[Key, Expr], coeff: Optional[Expr] = None) -> None:
    for (ds, xs), f in w_terms.items():
        try:
            k = ds.index(x)
        except ValueError:
            continue
        c = f if coeff is None else f * coeff
        _acc(out, (ds[:k] + ds[k + 1:], xs), c if k % 2 == 0 else -c)


def _interior_horizontal(w_terms: Dict[Key, Expr], j: int, out: Dict[Key, Expr], coeff: Optional[Expr] = None) -> None:
    for (ds, xs), f in w_terms.items():
        try:
            k = xs.index(j)
        except ValueError:
            continue
        c = f if coeff is None else f * coeff
        sgn = -1 if (len(ds) + k) % 2 else 1
        _acc(out, (ds, xs[:k] + xs[k + 1:]), c if sgn == 1 else -c)


class MultiVectorField:
    """Sum of coeff · ∂_{x_1} ∧ … ∧ ∂_{x_r} (∧ ∂_j) with at most one horizontal factor.

    Keys are ``(verticals, horizontals)`` with strictly increasing tuples.
    Coefficients of horizontal generators are restricted to constants times the
    vertical part's coefficient, which is all the construction needs.
    """

    __slots__ = ("alg", "terms")

    def __init__(self, alg: Algebra, terms: Optional[Dict[Key, Expr]] = None):
        self.alg = alg
        self.terms: Dict[Key, Expr] = {}
        for (vs, hs), c in (terms or {}).items():
            if len(hs) > 1:
                raise AlgebraError("multivectors with more than one horizontal factor are not supported")
            if c.terms:
                sv = sort_with_sign(vs)
                if sv is None:
                    continue
                _acc(self.terms, (sv[0], tuple(hs)), c if sv[1] == 1 else -c)

    @classmethod
    def vertical(cls, alg: Algebra, components: Dict[Var, Expr]) -> "MultiVectorField":
        return cls(alg, {((x,), ()): c for x, c in components.items()})

    @classmethod
    def bivector(cls, alg: Algebra, components: Dict[Tuple[Var, int], Expr]) -> "MultiVectorField":
        """Σ c · ∂_x ∧ ∂_j from a map (x, j) -> c."""
        return cls(alg, {((x,), (j,)): c for (x, j), c in components.items()})

    def __add__(self, other: "MultiVectorField") -> "MultiVectorField":
        out = dict(self.terms)
        for k, v in other.terms.items():
            _acc(out, k, v)
        return MultiVectorField(self.alg, out)

    def __neg__(self):
        return MultiVectorField(self.alg, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Expr) or is_scalar(other):
            return MultiVectorField(self.alg, {k: v * other for k, v in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, MultiVectorField) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def component(self, x: Var, j: Optional[int] = None) -> Expr:
        return self.terms.get(((x,), () if j is None else (j,)), self.alg.zero())

    def vertical_part(self, j: Optional[int] = None) -> Dict[Var, Expr]:
        """Components of the vertical factor paired with ∂_j (or of a vertical field)."""
        hs = () if j is None else (j,)
        return {vs[0]: c for (vs, h), c in self.terms.items() if h == hs and len(vs) == 1}

    def apply(self, e: Expr) -> Expr:
        """Action of a vertical vector field on a function."""
        out = self.alg.zero()
        for (vs, hs), c in self.terms.items():
            if hs or len(vs) != 1:
                raise AlgebraError("only vertical vector fields act on functions")
            out = out + c * e.partial(vs[0])
        return out

    def __repr__(self):
        from .render import render_vectorfield

        return f"MultiVectorField({render_vectorfield(self)})"


class VerticalShift:
    """The lazy vertical field ∂̃_i = Σ u^{(j)+e_i} ∂/∂u^{(j)} (position i, 0-based)."""

    __slots__ = ("i",)

    def __init__(self, i: int):
        self.i = i

    def __repr__(self):
        return f"VerticalShift({self.i})"

    def __eq__(self, other):
        return isinstance(other, VerticalShift) and other.i == self.i

    def __hash__(self):
        return hash(("shift", self.i))


def interior(x, w: Form) -> Form:
    """ι_x w for a MultiVectorField, VerticalShift or horizontal position int."""
    alg = w.alg
    out: Dict[Key, Expr] = {}
    if isinstance(x, VerticalShift):
        for v in w.delta_vars():
            vs = alg.var_expr((0, v[1], shift(v[2], x.i)))
            _interior_vertical(w.terms, v, out, vs)
        return Form(alg, out)
    if isinstance(x, int):
        _interior_horizontal(w.terms, x, out)
        return Form(alg, out)
    if isinstance(x, MultiVectorField):
        for (vs, hs), c in x.terms.items():
            cur: Dict[Key, Expr] = dict(w.terms)
            for j in reversed(hs):
                nxt: Dict[Key, Expr] = {}
                _interior_horizontal(cur, j, nxt)
                cur = nxt
            for v in reversed(vs):
                nxt = {}
                _interior_vertical(cur, v, nxt)
                cur = nxt
            for k, f in cur.items():
                _acc(out, k, f * c)
        return Form(alg, out)
    raise TypeError(f"cannot contract with {type(x).__name__}")


def interior_shift(i: int, w: Form) -> Form:
    return interior(VerticalShift(i), w)


def shift_action(i: int, w: Form) -> Form:
    """∂̃_i acting on a form as a derivation (Lie derivative along the vertical shift)."""
    alg = w.alg
    out: Dict[Key, Expr] = {}
    for (ds, xs), f in w.terms.items():
        _acc(out, (ds, xs), f.total_derivative(i))
        for k, v in enumerate(ds):
            vi = (0, v[1], shift(v[2], i))
            sd = sort_with_sign(ds[:k] + (vi,) + ds[k + 1:])
            if sd is None:
                continue
            _acc(out, (sd[0], xs), f if sd[1] == 1 else -f)
    return Form(alg, out)
