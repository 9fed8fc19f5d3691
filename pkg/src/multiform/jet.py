"""The differential algebra: jet variables, generators and sparse polynomials.

Variables are plain tuples so they sort and hash cheaply:

* jet variable ``(0, field, index)`` where ``index`` is a tuple of n counts,
* generator ``(1, gen, ())``.

Jet variables therefore precede generators, then order by field id and
multi-index.  A monomial is a sorted tuple of ``(var, exponent)`` pairs and an
:class:`Expr` maps monomials to nonzero scalars.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import AlgebraError
from .scalar import Scalar, as_scalar, is_scalar, mpq

Var = Tuple[int, int, Tuple[int, ...]]
Monomial = Tuple[Tuple[Var, int], ...]

ONE: Monomial = ()
_F0 = mpq(0)
_F1 = mpq(1)


def is_jet(v: Var) -> bool:
    return v[0] == 0


def shift(index: Tuple[int, ...], j: int, by: int = 1) -> Tuple[int, ...]:
    lst = list(index)
    lst[j] += by
    return tuple(lst)


def order(index: Sequence[int]) -> int:
    return sum(index)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_divides(small: Monomial, big: Monomial) -> bool:
    d = dict(big)
    return all(d.get(v, 0) >= e for v, e in small)


def mono_div(big: Monomial, small: Monomial) -> Monomial:
    d = dict(big)
    for v, e in small:
        d[v] -= e
    return tuple(sorted((v, e) for v, e in d.items() if e))


def mono_without(m: Monomial, pos: int) -> Monomial:
    """Lower the exponent of the factor at ``pos`` by one."""
    v, e = m[pos]
    if e == 1:
        return m[:pos] + m[pos + 1:]
    return m[:pos] + ((v, e - 1),) + m[pos + 1:]


def _add_into(acc: Dict[Monomial, Scalar], m: Monomial, c: Scalar) -> None:
    s = acc.get(m)
    if s is None:
        acc[m] = c
    else:
        s = s + c
        if s:
            acc[m] = s
        else:
            del acc[m]


def mono_sort_key(m: Monomial):
    return (-mono_degree(m), m)


@dataclass
class Generator:
    """An opaque function of the jet variables with declared first partials."""

    name: str
    partials: Dict[Var, "Expr"] = dc_field(default_factory=dict)


@dataclass
class Relation:
    """Reduction rule ``lhs -> rhs`` on generator monomials."""

    lhs: Monomial
    rhs: Dict[Monomial, Scalar]


class Algebra:
    """Fields, directions, generators and relations of one hierarchy."""

    def __init__(self, fields: Sequence[str], labels: Sequence[int], name: str = ""):
        if len(set(fields)) != len(fields):
            raise AlgebraError("duplicate field name")
        if len(set(labels)) != len(labels):
            raise AlgebraError("duplicate direction label")
        self.name = name
        self.fields: List[str] = list(fields)
        self.labels: List[int] = list(labels)
        self.n = len(self.labels)
        self.generators: List[Generator] = []
        self.relations: List[Relation] = []
        self._gen_index: Dict[str, int] = {}
        self._gen_shift: Dict[Tuple[int, int], Dict[Monomial, Scalar]] = {}

    # ---- naming ---------------------------------------------------------
    def field_id(self, name: str) -> int:
        try:
            return self.fields.index(name)
        except ValueError:
            raise AlgebraError(f"unknown field {name!r}") from None

    def pos(self, label: int) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise AlgebraError(f"unknown direction {label}") from None

    def gen_id(self, name: str) -> int:
        try:
            return self._gen_index[name]
        except KeyError:
            raise AlgebraError(f"unknown generator {name!r}") from None

    def has_generator(self, name: str) -> bool:
        return name in self._gen_index

    def zero_index(self) -> Tuple[int, ...]:
        return (0,) * self.n

    def index_from_labels(self, labels: Iterable[int]) -> Tuple[int, ...]:
        idx = [0] * self.n
        for lab in labels:
            idx[self.pos(lab)] += 1
        return tuple(idx)

    def index_labels(self, index: Sequence[int]) -> List[int]:
        out: List[int] = []
        for p, k in enumerate(index):
            out.extend([self.labels[p]] * k)
        return out

    def var_name(self, v: Var) -> str:
        """DSL spelling: ``v``, ``v[1,1,2]`` or a generator name."""
        if v[0] == 1:
            return self.generators[v[1]].name
        name = self.fields[v[1]]
        labs = self.index_labels(v[2])
        return f"{name}[{','.join(map(str, labs))}]" if labs else name

    # ---- construction ---------------------------------------------------
    def jetvar(self, field, index: Optional[Sequence[int]] = None) -> Var:
        f = self.field_id(field) if isinstance(field, str) else field
        if not 0 <= f < len(self.fields):
            raise AlgebraError(f"field id {f} out of range")
        idx = tuple(index) if index is not None else self.zero_index()
        if len(idx) != self.n or any(k < 0 for k in idx):
            raise AlgebraError(f"bad multi-index {idx} for n={self.n}")
        return (0, f, idx)

    def jet(self, field, index: Optional[Sequence[int]] = None) -> "Expr":
        return self.var_expr(self.jetvar(field, index))

    def d(self, field, *labels: int) -> "Expr":
        """Shorthand: ``alg.d('v', 1, 1, 2)`` is the jet variable v_{112}."""
        return self.jet(field, self.index_from_labels(labels))

    def var_expr(self, v: Var) -> "Expr":
        return Expr(self, {((v, 1),): _F1})

    def const(self, c) -> "Expr":
        c = as_scalar(c)
        return Expr(self, {ONE: c} if c else {})

    def zero(self) -> "Expr":
        return Expr(self, {})

    def one(self) -> "Expr":
        return Expr(self, {ONE: _F1})

    def add_generator(self, name: str) -> Var:
        if name in self._gen_index or name in self.fields:
            raise AlgebraError(f"duplicate name {name!r}")
        self._gen_index[name] = len(self.generators)
        self.generators.append(Generator(name))
        return (1, self._gen_index[name], ())

    def gen(self, name: str) -> "Expr":
        return self.var_expr((1, self.gen_id(name), ()))

    def set_partial(self, gen_name: str, var: Var, value: "Expr") -> None:
        if not is_jet(var):
            raise AlgebraError("generator partials are taken with respect to jet variables")
        self.generators[self.gen_id(gen_name)].partials[var] = value
        self._gen_shift.clear()

    def add_relation(self, lhs: Monomial, rhs: "Expr") -> None:
        if not lhs or any(v[0] != 1 for v, _ in lhs):
            raise AlgebraError("relations rewrite monomials in generators only")
        if any(mono_divides(lhs, m) for m in rhs.terms):
            raise AlgebraError("relation does not reduce its left-hand side")
        self.relations.append(Relation(lhs, dict(rhs.terms)))

    def add_relation_equation(self, eq: "Expr") -> None:
        """Orient ``eq = 0`` on its leading generator monomial."""
        cands = [m for m in eq.terms if m and all(v[0] == 1 for v, _ in m)]
        if not cands:
            raise AlgebraError("relation has no generator monomial to rewrite")
        lead = max(cands, key=lambda m: (mono_degree(m), m))
        c = eq.terms[lead]
        rest = {m: -k / c for m, k in eq.terms.items() if m != lead}
        self.add_relation(lead, Expr(self, rest))

    # ---- canonicalization -------------------------------------------------
    def normalize(self, terms: Dict[Monomial, Scalar]) -> Dict[Monomial, Scalar]:
        """Apply generator relations until no left-hand side divides a monomial."""
        if not self.relations:
            return terms
        out: Dict[Monomial, Scalar] = {}
        work = list(terms.items())
        while work:
            m, c = work.pop()
            if not c:
                continue
            for rel in self.relations:
                if mono_divides(rel.lhs, m):
                    q = mono_div(m, rel.lhs)
                    for rm, rc in rel.rhs.items():
                        work.append((mono_mul(q, rm), c * rc))
                    break
            else:
                _add_into(out, m, c)
        return out

    def __repr__(self):
        return f"Algebra(fields={self.fields}, labels={self.labels}, generators={[g.name for g in self.generators]})"

    # ---- calculus -------------------------------------------------------
    def _generator_derivative(self, g: int, j: int) -> Dict[Monomial, Scalar]:
        key = (g, j)
        hit = self._gen_shift.get(key)
        if hit is None:
            acc: Dict[Monomial, Scalar] = {}
            for y, py in self.generators[g].partials.items():
                ys = (0, y[1], shift(y[2], j))
                for m, c in py.terms.items():
                    _add_into(acc, mono_mul(m, ((ys, 1),)), c)
            hit = self.normalize(acc)
            self._gen_shift[key] = hit
        return hit


class Expr:
    """Canonical sparse polynomial over the algebra (immutable by convention)."""

    __slots__ = ("alg", "terms", "_hash")

    def __init__(self, alg: Algebra, terms: Dict[Monomial, Scalar]):
        self.alg = alg
        self.terms = terms
        self._hash = None

    # ---- basic protocol ---------------------------------------------------
    def _coerce(self, other) -> Optional["Expr"]:
        if isinstance(other, Expr):
            if other.alg is not self.alg:
                raise AlgebraError("mixing expressions from different algebras")
            return other
        if is_scalar(other):
            return self.alg.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.terms:
            return self
        if not self.terms:
            return o
        acc = dict(self.terms)
        for m, c in o.terms.items():
            _add_into(acc, m, c)
        return Expr(self.alg, acc)

    __radd__ = __add__

    def __neg__(self):
        return Expr(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c: Scalar) -> "Expr":
        if not c:
            return Expr(self.alg, {})
        return Expr(self.alg, {m: k * c for m, k in self.terms.items()})

    def __mul__(self, other):
        if is_scalar(other):
            return self.scale(as_scalar(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.terms or not o.terms:
            return Expr(self.alg, {})
        acc: Dict[Monomial, Scalar] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                _add_into(acc, mono_mul(m1, m2), c1 * c2)
        return Expr(self.alg, self.alg.normalize(acc))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if is_scalar(other):
            return self.scale(1 / as_scalar(other))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = self.alg.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Expr):
            return self.alg is other.alg and self.terms == other.terms
        if is_scalar(other):
            c = as_scalar(other)
            if not c:
                return not self.terms
            return self.terms == {ONE: c}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE in self.terms)

    def constant_value(self) -> Scalar:
        if not self.is_constant():
            raise AlgebraError("expression is not constant")
        return self.terms.get(ONE, _F0)

    def __repr__(self):
        from .render import render_expr

        return f"Expr({render_expr(self)})"

    def __str__(self):
        from .render import render_expr

        return render_expr(self)

    # ---- structure ----------------------------------------------------------
    def sorted_terms(self) -> List[Tuple[Monomial, Scalar]]:
        return sorted(self.terms.items(), key=lambda t: mono_sort_key(t[0]))

    def variables(self) -> set:
        out = set()
        for m in self.terms:
            for v, _ in m:
                out.add(v)
        return out

    def jet_dependencies(self) -> set:
        """Jet variables the value depends on, including through generators."""
        out = set()
        for v in self.variables():
            if v[0] == 0:
                out.add(v)
            else:
                out.update(self.alg.generators[v[1]].partials)
        return out

    def degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def max_order(self) -> int:
        return max((order(v[2]) for v in self.jet_dependencies()), default=0)

    def coefficient(self, m: Monomial) -> Scalar:
        return self.terms.get(m, _F0)

    def monomials(self) -> Iterator[Monomial]:
        return iter(self.terms)

    # ---- calculus -------------------------------------------------------
    def partial(self, x: Var) -> "Expr":
        """∂e/∂x for a jet variable x, with the chain rule through generators."""
        alg = self.alg
        acc: Dict[Monomial, Scalar] = {}
        chain: List[Tuple[Monomial, Scalar, "Expr"]] = []
        for m, c in self.terms.items():
            for k, (v, e) in enumerate(m):
                if v == x:
                    _add_into(acc, mono_without(m, k), c * e)
                elif v[0] == 1:
                    p = alg.generators[v[1]].partials.get(x)
                    if p is not None:
                        chain.append((mono_without(m, k), c * e, p))
        for rest, c, p in chain:
            for pm, pc in p.terms.items():
                _add_into(acc, mono_mul(rest, pm), c * pc)
        return Expr(alg, alg.normalize(acc) if chain else acc)

    def total_derivative(self, j: int) -> "Expr":
        """Total derivative along direction position ``j`` (0-based)."""
        alg = self.alg
        acc: Dict[Monomial, Scalar] = {}
        touched_gen = False
        for m, c in self.terms.items():
            for k, (v, e) in enumerate(m):
                rest = mono_without(m, k)
                if v[0] == 0:
                    vs = (0, v[1], shift(v[2], j))
                    _add_into(acc, mono_mul(rest, ((vs, 1),)), c * e)
                else:
                    touched_gen = True
                    for gm, gc in alg._generator_derivative(v[1], j).items():
                        _add_into(acc, mono_mul(rest, gm), c * e * gc)
        return Expr(alg, alg.normalize(acc) if touched_gen else acc)

    def multi_derivative(self, index: Sequence[int]) -> "Expr":
        out = self
        for j, k in enumerate(index):
            for _ in range(k):
                out = out.total_derivative(j)
        return out

    def substitute(self, f: Callable[[Var], Optional["Expr"]]) -> "Expr":
        """Replace each variable v by f(v) when f returns an Expr."""
        alg = self.alg
        cache: Dict[Var, Optional[Expr]] = {}
        powers: Dict[Tuple[Var, int], Expr] = {}
        out: Dict[Monomial, Scalar] = {}
        changed = False
        for m, c in self.terms.items():
            keep: List[Tuple[Var, int]] = []
            factors: List[Expr] = []
            for v, e in m:
                if v not in cache:
                    cache[v] = f(v)
                r = cache[v]
                if r is None:
                    keep.append((v, e))
                else:
                    key = (v, e)
                    if key not in powers:
                        powers[key] = r ** e
                    factors.append(powers[key])
            if not factors:
                _add_into(out, m, c)
                continue
            changed = True
            prod = Expr(alg, {tuple(keep): c})
            for fct in factors:
                prod = prod * fct
            for pm, pc in prod.terms.items():
                _add_into(out, pm, pc)
        if not changed:
            return self
        return Expr(alg, alg.normalize(out))


def total_derivative(e: Expr, j: int) -> Expr:
    return e.total_derivative(j)


def multi_derivative(e: Expr, index: Sequence[int]) -> Expr:
    return e.multi_derivative(index)


def partial(e: Expr, x: Var) -> Expr:
    return e.partial(x)


def normalize(alg: Algebra, terms: Dict[Monomial, Scalar]) -> Expr:
    clean = {}
    for m, c in terms.items():
        m = tuple(sorted((v, e) for v, e in _merge(m) if e))
        _add_into(clean, m, as_scalar(c))
    return Expr(alg, alg.normalize(clean))


def _merge(m) -> List[Tuple[Var, int]]:
    d: Dict[Var, int] = {}
    for v, e in m:
        d[v] = d.get(v, 0) + e
    return list(d.items())


def trig_algebra(alg: Algebra, field: str, cos_name: Optional[str] = None, sin_name: Optional[str] = None) -> Tuple[str, str]:
    """Declare the cos/sin generator pair of a field with its calculus and s^2 -> 1 - c^2."""
    c_name = cos_name or f"cos_{field}"
    s_name = sin_name or f"sin_{field}"
    alg.add_generator(c_name)
    alg.add_generator(s_name)
    u = alg.jetvar(field)
    alg.set_partial(c_name, u, -alg.gen(s_name))
    alg.set_partial(s_name, u, alg.gen(c_name))
    s = alg.gen(s_name)
    c = alg.gen(c_name)
    alg.add_relation_equation(s * s + c * c - 1)
    return c_name, s_name
