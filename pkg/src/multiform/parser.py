"""Parser for the ``.mf`` hierarchy language and for standalone expressions and forms.

Example::

    hierarchy pkdv;
    directions x1 .. x3;
    field v;
    L[1,2] = v[1]*v[2];

Jet variables are written ``v[1,1,2]`` (direction labels, any order).  In a
form, ``d x1`` and ``del v[1]`` are the generators and ``^`` between them is
the wedge product; ``^`` followed by an integer is a power.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Tuple, Union

from .errors import AlgebraError, MultiformError
from .forms import Form, wedge
from .jet import Algebra, Expr, Var, trig_algebra
from .scalar import I, Q, mpq

__all__ = ["SourceSpan", "ParseError", "HierarchySpec", "parse", "parse_hierarchy", "parse_expr", "parse_form", "render_spec"]

RESERVED = {"hierarchy", "directions", "field", "fields", "generator", "relation", "diff", "L", "omega1", "d", "del", "i"}


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValueError("invalid span")


class ParseError(MultiformError):
    """Diagnostic with a byte span into the input."""

    def __init__(self, message: str, span: SourceSpan, kind: str = "syntax"):
        super().__init__(f"{message} at bytes {span.start}..{span.end}")
        self.message = message
        self.span = span
        self.kind = kind


# ---------------------------------------------------------------------------
# lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<range>\.\.)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[;,\[\]()+\-*/^=])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str  # int, ident, punct, range, eof
    text: str
    start: int  # byte offsets
    end: int


def _decode(data: Union[str, bytes]) -> Tuple[str, List[int]]:
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError("input is not valid UTF-8", SourceSpan(e.start, e.end)) from None
    else:
        text = data
    offsets = [0]
    for ch in text:
        offsets.append(offsets[-1] + len(ch.encode("utf-8", "surrogatepass")))
    return text, offsets


def tokenize(data: Union[str, bytes]) -> List[Token]:
    text, off = _decode(data)
    toks: List[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(off[pos], off[pos + 1]))
        kind = m.lastgroup
        if kind != "ws":
            toks.append(Token(kind, m.group(), off[m.start()], off[m.end()]))
        pos = m.end()
    toks.append(Token("eof", "", off[-1], off[-1]))
    return toks


# ---------------------------------------------------------------------------
# syntax tree


@dataclass
class Node:
    span: SourceSpan


@dataclass
class Num(Node):
    value: Q


@dataclass
class Imag(Node):
    pass


@dataclass
class Name(Node):
    name: str
    labels: Optional[List[Tuple[int, SourceSpan]]]  # None: no brackets


@dataclass
class Call(Node):
    func: str
    arg: Node


@dataclass
class BinOp(Node):
    op: str
    left: Node
    right: Node


@dataclass
class Neg(Node):
    arg: Node


@dataclass
class Pow(Node):
    base: Node
    exp: int


@dataclass
class Basis(Node):
    """Chain of wedge generators: ('d', label) or ('del', Name)."""

    factors: List[Tuple[str, object, SourceSpan]]


@dataclass
class Stmt:
    kind: str
    span: SourceSpan
    data: dict


class _Parser:
    def __init__(self, toks: List[Token]):
        self.toks = toks
        self.i = 0

    # ---- helpers ------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("punct", "ident", "range") and t.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            t = self.tok
            found = "end of input" if t.kind == "eof" else repr(t.text)
            raise ParseError(f"expected {text!r}, found {found}", SourceSpan(t.start, t.end))
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        t = self.tok
        if t.kind != kind:
            found = "end of input" if t.kind == "eof" else repr(t.text)
            raise ParseError(f"expected {what}, found {found}", SourceSpan(t.start, t.end))
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        t = self.expect_kind("ident", what)
        return t

    # ---- statements ---------------------------------------------------
    def statements(self) -> List[Stmt]:
        out = []
        while self.tok.kind != "eof":
            out.append(self.statement())
        return out

    def statement(self) -> Stmt:
        t = self.tok
        start = t.start
        if self.at("hierarchy"):
            self.advance()
            name = self.ident("hierarchy name")
            end = self.expect(";").end
            return Stmt("hierarchy", SourceSpan(start, end), {"name": name.text})
        if self.at("directions"):
            self.advance()
            dirs = self.direction_list()
            end = self.expect(";").end
            return Stmt("directions", SourceSpan(start, end), {"dirs": dirs})
        if self.at("field") or self.at("fields"):
            self.advance()
            names = [self.ident("field name")]
            while self.at(","):
                self.advance()
                names.append(self.ident("field name"))
            end = self.expect(";").end
            return Stmt("fields", SourceSpan(start, end), {"names": names})
        if self.at("generator"):
            self.advance()
            name = self.ident("generator name")
            diffs = []
            if self.at("diff"):
                diffs.append(self.diff_clause())
                while self.at(","):
                    self.advance()
                    diffs.append(self.diff_clause())
            end = self.expect(";").end
            return Stmt("generator", SourceSpan(start, end), {"name": name, "diffs": diffs})
        if self.at("relation"):
            self.advance()
            lhs = self.expr()
            self.expect("=")
            rhs = self.expr()
            end = self.expect(";").end
            return Stmt("relation", SourceSpan(start, end), {"lhs": lhs, "rhs": rhs})
        if self.at("L"):
            self.advance()
            self.expect("[")
            a = self.expect_kind("int", "direction label")
            self.expect(",")
            b = self.expect_kind("int", "direction label")
            close = self.expect("]")
            self.expect("=")
            body = self.expr(allow_forms=False)
            end = self.expect(";").end
            return Stmt(
                "lagrangian",
                SourceSpan(start, end),
                {"i": int(a.text), "j": int(b.text), "key_span": SourceSpan(start, close.end), "body": body,
                 "label_spans": (SourceSpan(a.start, a.end), SourceSpan(b.start, b.end))},
            )
        if self.at("omega1"):
            self.advance()
            self.expect("=")
            body = self.expr(allow_forms=True)
            end = self.expect(";").end
            return Stmt("omega1", SourceSpan(start, end), {"body": body})
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"expected a statement, found {found}", SourceSpan(t.start, t.end))

    def direction_name(self) -> Tuple[int, SourceSpan]:
        t = self.ident("direction name")
        m = re.fullmatch(r"x([0-9]+)", t.text)
        if not m:
            raise ParseError(f"direction names look like x1, x2, ...; got {t.text!r}", SourceSpan(t.start, t.end))
        return int(m.group(1)), SourceSpan(t.start, t.end)

    def direction_list(self) -> List[Tuple[int, SourceSpan]]:
        first = self.direction_name()
        if self.tok.kind == "range":
            self.advance()
            last = self.direction_name()
            if last[0] < first[0]:
                raise ParseError("empty direction range", SourceSpan(first[1].start, last[1].end))
            return [(k, SourceSpan(first[1].start, last[1].end)) for k in range(first[0], last[0] + 1)]
        dirs = [first]
        while self.at(",") or (self.tok.kind == "ident" and self.tok.text.startswith("x")):
            if self.at(","):
                self.advance()
            dirs.append(self.direction_name())
        return dirs

    def diff_clause(self):
        start = self.expect("diff").start
        self.expect("(")
        var = self.jet_ref()
        self.expect(")")
        self.expect("=")
        body = self.expr()
        return {"var": var, "body": body, "span": SourceSpan(start, body.span.end)}

    def jet_ref(self) -> Name:
        t = self.ident("field name")
        labels = None
        end = t.end
        if self.at("["):
            self.advance()
            labels = []
            if not self.at("]"):
                n = self.expect_kind("int", "direction label")
                labels.append((int(n.text), SourceSpan(n.start, n.end)))
                while self.at(","):
                    self.advance()
                    n = self.expect_kind("int", "direction label")
                    labels.append((int(n.text), SourceSpan(n.start, n.end)))
            end = self.expect("]").end
        return Name(SourceSpan(t.start, end), t.text, labels)

    # ---- expressions ----------------------------------------------------
    def expr(self, allow_forms: bool = True) -> Node:
        start = self.tok.start
        if self.at("-"):
            self.advance()
            node: Node = self.term(allow_forms)
            node = Neg(SourceSpan(start, node.span.end), node)
        else:
            if self.at("+"):
                self.advance()
            node = self.term(allow_forms)
        while self.at("+") or self.at("-"):
            op = self.advance().text
            rhs = self.term(allow_forms)
            node = BinOp(SourceSpan(start, rhs.span.end), op, node, rhs)
        return node

    def term(self, allow_forms: bool) -> Node:
        node = self.factor(allow_forms)
        while self.at("*") or self.at("/"):
            op = self.advance().text
            rhs = self.factor(allow_forms)
            node = BinOp(SourceSpan(node.span.start, rhs.span.end), op, node, rhs)
        return node

    def factor(self, allow_forms: bool) -> Node:
        if self.at("-"):
            start = self.advance().start
            arg = self.factor(allow_forms)
            return Neg(SourceSpan(start, arg.span.end), arg)
        if allow_forms and (self.at("d") or self.at("del")):
            return self.basis_chain()
        base = self.atom(allow_forms)
        while self.at("^"):
            nxt = self.peek()
            if nxt.kind != "int":
                raise ParseError("expected an integer exponent after '^'", SourceSpan(nxt.start, nxt.end))
            self.advance()
            e = self.advance()
            base = Pow(SourceSpan(base.span.start, e.end), base, int(e.text))
        return base

    def basis_chain(self) -> Basis:
        start = self.tok.start
        factors = []
        while True:
            if self.at("d"):
                t = self.advance()
                lab, sp = self.direction_name()
                factors.append(("d", lab, SourceSpan(t.start, sp.end)))
            elif self.at("del"):
                t = self.advance()
                ref = self.jet_ref()
                factors.append(("del", ref, SourceSpan(t.start, ref.span.end)))
            else:
                t = self.tok
                raise ParseError("expected 'd' or 'del' after wedge", SourceSpan(t.start, t.end))
            if self.at("^") and self.peek().kind == "ident" and self.peek().text in ("d", "del"):
                self.advance()
                continue
            break
        return Basis(SourceSpan(start, factors[-1][2].end), factors)

    def atom(self, allow_forms: bool) -> Node:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return Num(SourceSpan(t.start, t.end), mpq(int(t.text)))
        if self.at("("):
            self.advance()
            inner = self.expr(allow_forms)
            end = self.expect(")").end
            inner.span = SourceSpan(t.start, end)
            return inner
        if t.kind == "ident":
            if t.text == "i":
                self.advance()
                return Imag(SourceSpan(t.start, t.end))
            if t.text in RESERVED:
                raise ParseError(f"unexpected keyword {t.text!r}", SourceSpan(t.start, t.end))
            if self.peek().kind == "punct" and self.peek().text == "(":
                self.advance()
                self.advance()
                arg = self.expr(allow_forms=False)
                end = self.expect(")").end
                return Call(SourceSpan(t.start, end), t.text, arg)
            return self.jet_ref()
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"expected an expression, found {found}", SourceSpan(t.start, t.end))


# ---------------------------------------------------------------------------
# semantics


@dataclass
class GeneratorDecl:
    name: str
    partials: Dict[Var, Expr] = dc_field(default_factory=dict)


@dataclass
class HierarchySpec:
    """The semantic model of a ``.mf`` file."""

    name: str
    alg: Algebra
    lagrangian: Dict[Tuple[int, int], Expr]  # keyed by direction positions (i < j)
    omega1: Optional[Form] = None

    @property
    def n(self) -> int:
        return self.alg.n

    @property
    def labels(self) -> List[int]:
        return self.alg.labels

    @property
    def fields(self) -> List[str]:
        return self.alg.fields

    def structure(self):
        """Algebra-independent description used for equality."""
        a = self.alg
        gens = tuple((g.name, tuple(sorted((v, tuple(sorted(e.terms.items(), key=str))) for v, e in g.partials.items())))
                     for g in a.generators)
        rels = tuple((r.lhs, tuple(sorted(r.rhs.items(), key=str))) for r in a.relations)
        lag = tuple(sorted((k, tuple(sorted(e.terms.items(), key=str))) for k, e in self.lagrangian.items() if e.terms))
        om = None
        if self.omega1 is not None:
            om = tuple(sorted((k, tuple(sorted(e.terms.items(), key=str))) for k, e in self.omega1.terms.items()))
        return (self.name, tuple(a.fields), tuple(a.labels), gens, rels, lag, om)

    def __eq__(self, other):
        return isinstance(other, HierarchySpec) and self.structure() == other.structure()

    def multiform(self):
        from .variational import LagrangianMultiform

        return LagrangianMultiform(self.alg, dict(self.lagrangian))


class _Builder:
    def __init__(self, alg: Algebra):
        self.alg = alg

    def err(self, msg, span, kind="semantic"):
        raise ParseError(msg, span, kind)

    def jet(self, node: Name) -> Var:
        alg = self.alg
        if node.name not in alg.fields:
            self.err(f"unknown field {node.name!r}", node.span, "unknown-identifier")
        idx = [0] * alg.n
        for lab, sp in node.labels or []:
            if lab not in alg.labels:
                self.err(f"unknown direction label {lab}", sp, "unknown-identifier")
            idx[alg.labels.index(lab)] += 1
        return alg.jetvar(node.name, idx)

    def value(self, node: Node):
        """Evaluate to an Expr or a Form."""
        alg = self.alg
        if isinstance(node, Num):
            return alg.const(node.value)
        if isinstance(node, Imag):
            return alg.const(I)
        if isinstance(node, Name):
            if node.labels is None and alg.has_generator(node.name):
                return alg.gen(node.name)
            if node.name not in alg.fields:
                self.err(f"unknown identifier {node.name!r}", node.span, "unknown-identifier")
            return alg.var_expr(self.jet(node))
        if isinstance(node, Call):
            if node.func not in ("cos", "sin"):
                self.err(f"unknown function {node.func!r}", node.span, "unknown-identifier")
            arg = node.arg
            if not (isinstance(arg, Name) and arg.labels is None and arg.name in alg.fields):
                self.err("cos/sin take a field name", arg.span)
            cname, sname = f"cos_{arg.name}", f"sin_{arg.name}"
            if not alg.has_generator(cname):
                if alg.has_generator(sname):
                    self.err(f"{sname} declared without {cname}", node.span)
                trig_algebra(alg, arg.name)
            return alg.gen(cname if node.func == "cos" else sname)
        if isinstance(node, Neg):
            v = self.value(node.arg)
            return -v
        if isinstance(node, Pow):
            v = self.value(node.base)
            if isinstance(v, Form):
                self.err("cannot raise a form to a power", node.span)
            if node.exp > 64:
                self.err("exponent too large", node.span)
            return v ** node.exp
        if isinstance(node, BinOp):
            a = self.value(node.left)
            b = self.value(node.right)
            if node.op == "+" or node.op == "-":
                if isinstance(a, Form) or isinstance(b, Form):
                    a = a if isinstance(a, Form) else Form.function(a)
                    b = b if isinstance(b, Form) else Form.function(b)
                return a + b if node.op == "+" else a - b
            if node.op == "*":
                if isinstance(a, Form) and isinstance(b, Form):
                    return wedge(a, b)
                return a * b
            if node.op == "/":
                if isinstance(b, Form) or not b.is_constant() or b.is_zero():
                    self.err("division only by a nonzero constant", node.right.span)
                c = b.constant_value()
                return a * (1 / c)
        if isinstance(node, Basis):
            out = None
            for kind, payload, sp in node.factors:
                if kind == "d":
                    if payload not in alg.labels:
                        self.err(f"unknown direction x{payload}", sp, "unknown-identifier")
                    f = Form.dx(alg, alg.labels.index(payload))
                else:
                    f = Form.delta(alg, self.jet(payload))
                out = f if out is None else wedge(out, f)
            return out
        self.err("unsupported syntax", node.span)


def _stmts(data) -> List[Stmt]:
    return _Parser(tokenize(data)).statements()


def parse_hierarchy(data: Union[str, bytes]) -> HierarchySpec:
    stmts = _stmts(data)
    name = ""
    dirs: Optional[List[Tuple[int, SourceSpan]]] = None
    fields: List[Token] = []
    first_span = stmts[0].span if stmts else SourceSpan(0, 0)
    for s in stmts:
        if s.kind == "hierarchy":
            name = s.data["name"]
        elif s.kind == "directions":
            if dirs is not None:
                raise ParseError("directions declared twice", s.span, "duplicate")
            dirs = s.data["dirs"]
        elif s.kind == "fields":
            fields.extend(s.data["names"])
    if dirs is None:
        raise ParseError("missing 'directions' declaration", first_span, "semantic")
    if not fields:
        raise ParseError("missing 'field' declaration", first_span, "semantic")
    labels = []
    for lab, sp in dirs:
        if lab in labels:
            raise ParseError(f"direction x{lab} declared twice", sp, "duplicate")
        labels.append(lab)
    names = []
    for t in fields:
        if t.text in RESERVED:
            raise ParseError(f"{t.text!r} is reserved", SourceSpan(t.start, t.end))
        if t.text in names:
            raise ParseError(f"field {t.text!r} declared twice", SourceSpan(t.start, t.end), "duplicate")
        names.append(t.text)
    alg = Algebra(names, labels, name)
    b = _Builder(alg)
    gen_stmts = [s for s in stmts if s.kind == "generator"]
    for s in gen_stmts:
        t = s.data["name"]
        if t.text in RESERVED or t.text in names or alg.has_generator(t.text):
            raise ParseError(f"name {t.text!r} already in use", SourceSpan(t.start, t.end), "duplicate")
        alg.add_generator(t.text)
    for s in gen_stmts:
        for dc in s.data["diffs"]:
            var = b.jet(dc["var"])
            val = b.value(dc["body"])
            if isinstance(val, Form):
                b.err("a partial derivative must be an expression", dc["span"])
            alg.set_partial(s.data["name"].text, var, val)
    for s in stmts:
        if s.kind == "relation":
            lhs = b.value(s.data["lhs"])
            rhs = b.value(s.data["rhs"])
            if isinstance(lhs, Form) or isinstance(rhs, Form):
                b.err("relations are between expressions", s.span)
            try:
                alg.add_relation_equation(lhs - rhs)
            except AlgebraError as e:
                b.err(str(e), s.span)
    lag: Dict[Tuple[int, int], Expr] = {}
    omega1 = None
    for s in stmts:
        if s.kind == "lagrangian":
            i, j = s.data["i"], s.data["j"]
            for lab, sp in zip((i, j), s.data["label_spans"]):
                if lab not in labels:
                    raise ParseError(f"unknown direction label {lab}", sp, "unknown-identifier")
            pi, pj = labels.index(i), labels.index(j)
            if pi >= pj:
                raise ParseError("Lagrangian coefficients are written L[i,j] with i before j", s.data["key_span"], "semantic")
            if (pi, pj) in lag:
                raise ParseError(f"duplicate coefficient L[{i},{j}]", s.data["key_span"], "duplicate")
            val = b.value(s.data["body"])
            if isinstance(val, Form):
                b.err("Lagrangian coefficients are expressions", s.span)
            lag[(pi, pj)] = val
        elif s.kind == "omega1":
            if omega1 is not None:
                raise ParseError("omega1 given twice", s.span, "duplicate")
            val = b.value(s.data["body"])
            if not isinstance(val, Form) or val.bidegrees() - {(1, 1)}:
                b.err("omega1 must be a (1,1)-form", s.span)
            omega1 = val
    return HierarchySpec(name, alg, lag, omega1)


def _single(data, alg: Algebra, allow_forms: bool):
    p = _Parser(tokenize(data))
    node = p.expr(allow_forms)
    if p.tok.kind != "eof":
        t = p.tok
        raise ParseError(f"unexpected {t.text!r} after expression", SourceSpan(t.start, t.end))
    return _Builder(alg).value(node)


def parse_expr(data: Union[str, bytes], alg: Algebra) -> Expr:
    val = _single(data, alg, allow_forms=False)
    return val


def parse_form(data: Union[str, bytes], alg: Algebra) -> Form:
    val = _single(data, alg, allow_forms=True)
    return val if isinstance(val, Form) else Form.function(val)


def parse(data: Union[str, bytes], alg: Optional[Algebra] = None):
    """Parse a hierarchy file, or an expression/form when ``alg`` is given."""
    if alg is None:
        return parse_hierarchy(data)
    val = _single(data, alg, allow_forms=True)
    return val


# ---------------------------------------------------------------------------
# rendering a specification back to source


def render_spec(spec: HierarchySpec) -> str:
    from .render import render_expr, render_form

    alg = spec.alg
    lines = []
    if spec.name:
        lines.append(f"hierarchy {spec.name};")
    lines.append("directions " + ", ".join(f"x{lab}" for lab in alg.labels) + ";")
    lines.append("field " + ", ".join(alg.fields) + ";")
    for g in alg.generators:
        diffs = ", ".join(f"diff({alg.var_name(v)}) = {render_expr(e)}" for v, e in sorted(g.partials.items()))
        lines.append(f"generator {g.name}" + (f" {diffs}" if diffs else "") + ";")
    for r in alg.relations:
        lhs = Expr(alg, {r.lhs: mpq(1)})
        lines.append(f"relation {render_expr(lhs)} = {render_expr(Expr(alg, dict(r.rhs)))};")
    for (i, j), e in sorted(spec.lagrangian.items()):
        lines.append(f"L[{alg.labels[i]},{alg.labels[j]}] = {render_expr(e)};")
    if spec.omega1 is not None:
        lines.append(f"omega1 = {render_form(spec.omega1)};")
    return "\n".join(lines) + "\n"
