"""Command-line driver: ``multiform el|derive|check|conslaw|bracket|corpus|schema``.

Exit codes: 0 all checks pass, 1 usage, 2 parse error, 3 the variational
pipeline could not decompose or orient, 4 a requested check failed.
"""

from __future__ import annotations

import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional

import click

from .core import Hierarchy, spatial_constraints
from .errors import MultiformError, NonDecomposable, NonOrientable, NotHamiltonian
from .forms import Form, MultiVectorField, horizontal_d
from .jet import Expr
from .parser import HierarchySpec, ParseError, parse_form, parse_hierarchy
from .poisson import (
    AnsatzSpec,
    conservation_check,
    conservation_search,
    covariant_bracket,
    decomposition_check,
    hamilton_identity_residual,
    hamiltonian_form_basis,
    hamiltonian_vector_field,
    multitime_bracket,
    single_time_bracket,
)
from .render import JSON_SCHEMA, latex_expr, render, to_json
from .rewrite import Equation

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_PIPELINE, EXIT_CHECK = 0, 1, 2, 3, 4
DEFAULT_SEED = 0
CORPUS = ("pkdv123", "pkdv135", "sg123", "akns1234")


# ---------------------------------------------------------------------------
# reports


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    command: str
    source: str
    seed: Optional[int] = None
    checks: List[Check] = field(default_factory=list)
    objects: List[tuple] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(passed), detail))
        return passed

    def add(self, name: str, value) -> None:
        self.objects.append((name, value))

    def as_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "source": self.source,
            "seed": self.seed,
            "ok": self.ok,
            "checks": [{"name": c.name, "status": "pass" if c.passed else "fail", "detail": c.detail} for c in self.checks],
            "objects": [{"name": n, "text": _text(v), "value": _json(v)} for n, v in self.objects],
            "timing": {"seconds": round(self.seconds, 3)},
        }


def _text(v) -> str:
    if isinstance(v, Equation):
        return str(v)
    if isinstance(v, (Expr, Form, MultiVectorField)):
        return render(v, "text")
    return str(v)


def _latex(v) -> str:
    if isinstance(v, Equation):
        return f"{latex_expr(v.lhs)} = {latex_expr(v.rhs)}"
    if isinstance(v, (Expr, Form, MultiVectorField)):
        return render(v, "latex")
    return f"\\text{{{v}}}"


def _json(v):
    if isinstance(v, Equation):
        return {"kind": "equation", "lhs": to_json(v.lhs), "rhs": to_json(v.rhs)}
    if isinstance(v, (Expr, Form, MultiVectorField)):
        return to_json(v)
    return {"kind": "text", "text": str(v)}


REPORT_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "multiform report",
    "type": "object",
    "required": ["command", "source", "seed", "ok", "checks", "objects", "timing"],
    "properties": {
        "command": {"type": "string"},
        "source": {"type": "string"},
        "seed": {"type": ["integer", "null"]},
        "ok": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "status", "detail"],
                "properties": {
                    "name": {"type": "string"},
                    "status": {"enum": ["pass", "fail"]},
                    "detail": {"type": "string"},
                },
            },
        },
        "objects": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "text", "value"],
                "properties": {
                    "name": {"type": "string"},
                    "text": {"type": "string"},
                    "value": {
                        "oneOf": [
                            {"$ref": "#/$defs/object"},
                            {
                                "type": "object",
                                "required": ["kind", "lhs", "rhs"],
                                "properties": {
                                    "kind": {"const": "equation"},
                                    "lhs": {"$ref": "#/$defs/object"},
                                    "rhs": {"$ref": "#/$defs/object"},
                                },
                            },
                            {
                                "type": "object",
                                "required": ["kind", "text"],
                                "properties": {"kind": {"const": "text"}, "text": {"type": "string"}},
                            },
                        ]
                    },
                },
            },
        },
        "timing": {"type": "object", "required": ["seconds"], "properties": {"seconds": {"type": "number"}}},
    },
    "$defs": {"object": {k: v for k, v in JSON_SCHEMA.items() if k not in ("$schema", "title")}},
}


def _use_color() -> Optional[bool]:
    val = os.environ.get("MULTIFORM_COLOR")
    if val == "1":
        return True
    if val == "0":
        return False
    return None


def emit(report: Report, fmt: str) -> None:
    color = _use_color()
    if fmt == "json":
        click.echo(json.dumps(report.as_dict(), sort_keys=True, indent=2))
        return
    if fmt == "latex":
        click.echo(f"% multiform {report.command} {report.source}" + (f" (seed {report.seed})" if report.seed is not None else ""))
        for c in report.checks:
            click.echo(f"% {'PASS' if c.passed else 'FAIL'} {c.name}" + (f": {c.detail}" if c.detail else ""))
        if report.objects:
            click.echo("\\begin{align*}")
            lines = [f"  \\text{{{n}}} &: {_latex(v)}" for n, v in report.objects]
            click.echo(" \\\\\n".join(lines))
            click.echo("\\end{align*}")
        return
    head = f"multiform {report.command} {report.source}"
    if report.seed is not None:
        head += f" (seed {report.seed})"
    click.echo(head)
    for c in report.checks:
        tag = click.style("PASS", fg="green") if c.passed else click.style("FAIL", fg="red")
        click.echo(f"  {tag} {c.name}" + (f": {c.detail}" if c.detail else ""), color=color)
    for n, v in report.objects:
        click.echo(f"  {n}: {_text(v)}")
    click.echo(f"  ({report.seconds:.2f}s)")


# ---------------------------------------------------------------------------
# inputs


def corpus_text(name: str) -> bytes:
    if name not in CORPUS:
        raise click.UsageError(f"unknown corpus entry {name!r}; choose from {', '.join(CORPUS)}")
    return resources.files("multiform").joinpath("corpus", f"{name}.mf").read_bytes()


def load_source(source: str) -> HierarchySpec:
    """A path, or ``@name`` for a bundled corpus file."""
    if source.startswith("@"):
        data = corpus_text(source[1:])
    else:
        try:
            data = Path(source).read_bytes()
        except OSError as exc:
            raise click.UsageError(f"cannot read {source}: {exc.strerror}") from None
    return parse_hierarchy(data)


def _common(f):
    f = click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True, help="Seed for randomized checks.")(f)
    f = click.option(
        "--format", "fmt", type=click.Choice(["text", "json", "latex"]), default="text", show_default=True
    )(f)
    return f


def _finish(report: Report, fmt: str, t0: float) -> None:
    report.seconds = time.time() - t0
    emit(report, fmt)
    if not report.ok:
        raise SystemExit(EXIT_CHECK)


def _hamiltonian_probes(hier: Hierarchy, order: int, degree: int, seed: int, count: int = 3) -> List[Form]:
    """Seeded random Hamiltonian 1-forms from the polynomial ansatz."""
    basis = hamiltonian_form_basis(hier.symplectic, order, degree)
    if not basis:
        return []
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        F = Form.zero(hier.alg)
        for b in rng.sample(basis, min(3, len(basis))):
            F = F + b * rng.randint(-3, 3)
        out.append(F)
    return out


def _max_symplectic_order(hier: Hierarchy) -> int:
    return max((sum(v[2]) for w in hier.symplectic.components.values() for v in w.delta_vars()), default=0)


# ---------------------------------------------------------------------------
# commands


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Lagrangian multiform engine."""


@main.command("el")
@click.argument("source")
@_common
def cmd_el(source: str, fmt: str, seed: int):
    """Multiform Euler-Lagrange equations."""
    t0 = time.time()
    hier = Hierarchy.from_spec(load_source(source))
    report = Report("el", source)
    for k, eq in enumerate(hier.rewrite_system.equations()):
        report.add(f"E{k + 1}", eq)
    _finish(report, fmt, t0)


@main.command("derive")
@click.argument("source")
@_common
def cmd_derive(source: str, fmt: str, seed: int):
    """Omega1, the Hamiltonian multiform and the symplectic multiform."""
    t0 = time.time()
    hier = Hierarchy.from_spec(load_source(source))
    report = Report("derive", source)
    alg = hier.alg
    report.add("Omega1", hier.omega1)
    for (i, j), h in sorted(hier.hamiltonian.coefficients.items()):
        report.add(f"H[{alg.labels[i]},{alg.labels[j]}]", h)
    for j in range(alg.n):
        report.add(f"omega[{alg.labels[j]}]", hier.symplectic.omega(j))
    _finish(report, fmt, t0)


@main.command("check")
@click.argument("source")
@_common
def cmd_check(source: str, fmt: str, seed: int):
    """Closure identities, the gauge lemma and dF = i_xi dH for Hamiltonian forms."""
    t0 = time.time()
    hier = Hierarchy.from_spec(load_source(source))
    report = Report("check", source, seed)
    rng = random.Random(seed)
    seeds = [rng.randrange(2**31) for _ in range(2)]
    rep = hier.check(seeds)
    names = {
        "closure_L": "dL = 0 on shell",
        "theorem_dH_plus_2dL": "dH + 2 dL = 0 on shell",
        "closure_H": "dH = 0 on shell",
        "closure_Omega": "dOmega = 0 on shell",
    }
    for key, label in names.items():
        res = rep.residuals[key]
        report.check(label, not res, "" if not res else f"residual {render(res)}")
    report.check("gauge invariance of H", rep.gauge, f"gauge seeds {seeds}")
    constraints = spatial_constraints(hier.rewrite_system)
    report.check(
        "E-L equations are evolutionary",
        not constraints,
        "; ".join(f"constrains initial data: {e}" for e in constraints[:3]),
    )

    order = _max_symplectic_order(hier)
    rs, H, Om = hier.rewrite_system, hier.hamiltonian, hier.symplectic
    search = conservation_search(AnsatzSpec(order, 4, "hamiltonian"), hier)
    for k, F in enumerate(search.laws):
        report.add(f"F{k + 1}", F)
        report.check(f"F{k + 1} conserved", conservation_check(F, H, rs, Om))
    probes = search.laws + _hamiltonian_probes(hier, order, 2, seed)
    h12 = _try_hamiltonian(Form.function(H.H(0, 1)), Om) if hier.alg.n == 2 else None
    bad = []
    for F in probes:
        hf = hamiltonian_vector_field(F, Om, 1)
        res = hamilton_identity_residual(hf, H, rs)
        if res:
            bad.append(render(res))
        if h12 is not None:
            # n = 2: dF = {|H_12, F|}_c dx^12 with the covariant bracket
            c = covariant_bracket(h12, hf, Om).coefficient()
            if rs.normal_form(Form.monomial(c, (), (0, 1)) - horizontal_d(F)):
                bad.append("covariant specialization dF = {|H_12, F|}_c dx^12 fails")
    report.check(f"dF = i_xi dH on {len(probes)} Hamiltonian 1-forms", not bad, "; ".join(bad[:1]))
    _finish(report, fmt, t0)


def _try_hamiltonian(F: Form, Om):
    try:
        return hamiltonian_vector_field(F, Om)
    except NotHamiltonian:
        return None


@main.command("conslaw")
@click.argument("source")
@click.option("--order", type=click.IntRange(0, 12), default=3, show_default=True, help="Maximal jet order.")
@click.option("--degree", type=click.IntRange(1, 8), default=3, show_default=True, help="Maximal polynomial degree.")
@click.option("--mode", type=click.Choice(["hamiltonian", "closed"]), default="hamiltonian", show_default=True)
@_common
def cmd_conslaw(source: str, order: int, degree: int, mode: str, fmt: str, seed: int):
    """Search for conservation laws within polynomial bounds."""
    t0 = time.time()
    hier = Hierarchy.from_spec(load_source(source))
    report = Report("conslaw", source)
    res = conservation_search(AnsatzSpec(order, degree, mode), hier)
    for k, F in enumerate(res.laws):
        report.add(f"F{k + 1}", F)
    report.check(f"{len(res.laws)} law(s) from {res.unknowns} unknowns", True)
    _finish(report, fmt, t0)


@main.command("bracket")
@click.argument("source")
@click.option("--lhs", required=True, help="First Hamiltonian form (or function with --time).")
@click.option("--rhs", required=True, help="Second Hamiltonian form (or function with --time).")
@click.option("--time", "direction", type=int, default=None, help="Direction label for a single-time bracket.")
@_common
def cmd_bracket(source: str, lhs: str, rhs: str, direction: Optional[int], fmt: str, seed: int):
    """Multi-time bracket of two forms, or single-time bracket with --time."""
    t0 = time.time()
    hier = Hierarchy.from_spec(load_source(source))
    alg, Om = hier.alg, hier.symplectic
    report = Report("bracket", source)
    P, Q = parse_form(lhs, alg), parse_form(rhs, alg)
    if direction is not None:
        if direction not in alg.labels:
            raise click.UsageError(f"unknown direction {direction}")
        i = alg.pos(direction)
        f, g = P.coefficient(), Q.coefficient()
        if any(k != ((), ()) for k in list(P.terms) + list(Q.terms)):
            raise click.UsageError("--time expects functions (0-forms)")
        try:
            report.add(f"{{lhs, rhs}}_{direction}", single_time_bracket(f, g, i, Om))
            report.check(f"both Hamiltonian for omega[{direction}]", True)
        except NotHamiltonian as exc:
            report.check(f"both Hamiltonian for omega[{direction}]", False, f"{exc} ({exc.certificate})")
        _finish(report, fmt, t0)
        return
    forms = []
    for name, F in (("lhs", P), ("rhs", Q)):
        try:
            hf = hamiltonian_vector_field(F, Om)
            report.check(f"{name} Hamiltonian", True)
            report.add(f"xi_{name}", hf.vectorfield)
            forms.append(hf)
        except NotHamiltonian as exc:
            report.check(f"{name} Hamiltonian", False, f"{exc} ({exc.certificate})")
        except ValueError as exc:
            raise click.UsageError(str(exc)) from None
    if len(forms) == 2:
        report.add("{|lhs, rhs|}", multitime_bracket(*forms))
        if forms[0].degree == 1 and forms[1].degree == 1:
            dec = decomposition_check(P, Q, Om)
            report.add("sum_i {lhs_i, rhs_i}_i dx^i", dec.rhs)
            report.check("decomposition into single-time brackets", dec.holds and dec.xi_serves_each_component)
    _finish(report, fmt, t0)


@main.group("corpus")
def corpus():
    """Bundled hierarchy files."""


@corpus.command("list")
def corpus_list():
    for name in CORPUS:
        click.echo(name)


@corpus.command("export")
@click.argument("names", nargs=-1)
@click.option("-o", "--out", "out", type=click.Path(file_okay=False), default=None, help="Directory to write into.")
def corpus_export(names, out):
    """Print a corpus file, or write the named (default: all) files into --out."""
    names = names or (CORPUS if out else ())
    if not names:
        raise click.UsageError("name a corpus entry or give --out")
    if out is None:
        for n in names:
            click.echo(corpus_text(n).decode(), nl=False)
        return
    Path(out).mkdir(parents=True, exist_ok=True)
    for n in names:
        (Path(out) / f"{n}.mf").write_bytes(corpus_text(n))
        click.echo(str(Path(out) / f"{n}.mf"))


@main.command("schema")
def cmd_schema():
    """JSON schema of --format json reports."""
    click.echo(json.dumps(REPORT_SCHEMA, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# entry point


def run(argv: Optional[List[str]] = None) -> int:
    try:
        main.main(args=argv, prog_name="multiform", standalone_mode=False)
        return EXIT_OK
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except ParseError as exc:
        click.echo(f"parse error: {exc}", err=True)
        return EXIT_PARSE
    except (NonDecomposable, NonOrientable) as exc:
        click.echo(f"{type(exc).__name__}: {exc}", err=True)
        return EXIT_PIPELINE
    except MultiformError as exc:
        click.echo(f"{type(exc).__name__}: {exc}", err=True)
        return EXIT_CHECK


def entry() -> None:
    sys.exit(run())


if __name__ == "__main__":
    entry()
