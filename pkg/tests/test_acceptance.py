"""Acceptance criteria, one PASS/FAIL line each.

Run with pytest (lines are printed in the terminal summary) or directly:
``python tests/test_acceptance.py``.
"""

import contextlib
import io
import random
import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import CORPUS, expr, form, hierarchy, spec, weights  # noqa: E402

from multiform import hamiltonian_multiform, render  # noqa: E402
from multiform.cli import corpus_text, run  # noqa: E402
from multiform.core import equivalent_systems, multiform_hamilton_system, symplectic_multiform  # noqa: E402
from multiform.forms import Form  # noqa: E402
from multiform.parser import parse_expr, parse_form, parse_hierarchy, ParseError, SourceSpan, render_spec  # noqa: E402
from multiform.poisson import (  # noqa: E402
    AnsatzSpec,
    conservation_report,
    conservation_search,
    decomposition_check,
    single_time_bracket,
)

RESULTS = {}
CRITERIA = {}


def criterion(number, title):
    def register(fn):
        CRITERIA[number] = (title, fn)
        return fn

    return register


class Checks:
    """Collects named sub-checks; a criterion passes when all of them do."""

    def __init__(self):
        self.failed = []
        self.notes = []

    def __call__(self, name, ok):
        if not ok:
            self.failed.append(name)
        return ok

    def note(self, text):
        self.notes.append(text)

    def result(self):
        detail = "; ".join(self.notes)
        if self.failed:
            detail = "failed: " + ", ".join(self.failed) + (f" ({detail})" if detail else "")
        return not self.failed, detail


# ---------------------------------------------------------------------------


@criterion(1, "pKdV(1,2,3) E-L set, Omega1, Omega and H")
def pkdv123_objects():
    h = hierarchy("pkdv123")
    c = Checks()
    c("E-L", sorted(map(str, h.rewrite_system.equations())) == ["v[2] = 0", "v[3] = 3*v[1]^2 + v[1,1,1]"])
    c("Omega1", h.omega1 == form(
        h,
        "-v[1]*del v^d x1 + v[2]*del v^d x2 + (v[3] - 2*v[1,1,1] - 6*v[1]^2)*del v*d x3"
        " + v[1,1]*del v[1]^d x3 - v[1]*del v[1,1]^d x3",
    ))
    c("Omega", h.symplectic.form() == form(
        h,
        "-del v[1]^del v^d x1 + del v[2]^del v^d x2 + del v[3]^del v^d x3 - 2*del v[1,1,1]^del v^d x3"
        " - 12*v[1]*del v[1]^del v^d x3 + 2*del v[1,1]^del v[1]^d x3",
    ))
    H = h.hamiltonian
    c("H12", H.H(0, 1) == expr(h, "v[1]*v[2]"))
    c("H23", H.H(1, 2) == expr(h, "-3*v[1]^2*v[2] - v[1,1,1]*v[2]"))
    c("H13", H.H(0, 2) == expr(h, "v[1]*v[3] - 4*v[1]^3 + v[1,1]^2 - 2*v[1]*v[1,1,1]"))
    return c.result()


@criterion(2, "pKdV alternative decomposition")
def alternative_decomposition():
    from test_core import ALT_OMEGA1
    from multiform.core import HamiltonianMultiform

    h = hierarchy("pkdv123")
    W = form(h, ALT_OMEGA1)
    H = hamiltonian_multiform(h.L, W)
    c = Checks()
    c("H~12", H.H(0, 1) == expr(h, "1/2*v[1]*v[2]"))
    c("H~23", H.H(1, 2) == expr(h, "-3/2*v[1]^2*v[2] - 1/2*v[2]*v[1,1,1]"))
    reference = expr(h, "1/2*v[1]*v[3] + v[1,1]^2 - 5/2*v[1]^3 - 5/2*v[1]*v[1,1,1]")
    corrected = reference + expr(h, "v[1]*v[1,1,1]")
    c("H~13", H.H(0, 2) == corrected)
    Om = symplectic_multiform(W)
    c("Hamilton equations equivalent to E-L", equivalent_systems(multiform_hamilton_system(H, Om), h.rewrite_system))
    with_reference = HamiltonianMultiform(h.alg, {(0, 1): H.H(0, 1), (1, 2): H.H(1, 2), (0, 2): reference})
    c(
        "reference H~13 rejected by the Hamilton-equivalence oracle",
        not equivalent_systems(multiform_hamilton_system(with_reference, Om), h.rewrite_system),
    )
    c.note("H~13 v1*v111 coefficient -3/2, reference -5/2 fails Hamilton equivalence")
    return c.result()


@criterion(3, "pKdV(1,3,5) E-L set and H")
def pkdv135_objects():
    from test_core import KDV_WEIGHT

    h = hierarchy("pkdv135")
    H = h.hamiltonian
    c = Checks()
    c("E-L", sorted(map(str, h.rewrite_system.equations())) == [
        "v[3] = 3*v[1]^2 + v[1,1,1]",
        "v[5] = 10*v[1]^3 + 10*v[1]*v[1,1,1] + 5*v[1,1]^2 + v[1,1,1,1,1]",
    ])
    c("H13", H.H(0, 1) == expr(h, "v[1]*v[3] + v[1,1]^2 - 2*v[1]*v[1,1,1] - 4*v[1]^3"))
    reference_h15 = expr(
        h, "v[1]*v[5] - 15*v[1]^4 - 20*v[1]^2*v[1,1,1] - 2*v[1,1,1,1,1]*v[1] + 2*v[1,1,1,1]*v[1] - v[1,1,1]^2"
    )
    corrected_h15 = reference_h15 + expr(h, "2*v[1,1,1,1]*v[1,1] - 2*v[1,1,1,1]*v[1]")
    c("H15", H.H(0, 2) == corrected_h15)
    c("H15 homogeneous (scaling oracle)", weights(H.H(0, 2), *KDV_WEIGHT) == {8})
    c("reference H15 inhomogeneous", weights(reference_h15, *KDV_WEIGHT) == {7, 8})
    c("H35", H.H(1, 2) == expr(
        h,
        "-10*v[1]^3*v[3] - 10*v[1]*v[1,1,1]*v[3] - 5*v[1,1]^2*v[3] - v[1,1,1,1,1]*v[3] + v[1,1,1]*v[5]"
        " + 3*v[1]^2*v[5] - 6*v[1]^5 - 20*v[1]^3*v[1,1,1] + 15*v[1]^2*v[1,1]^2 - 3*v[1]^2*v[1,1,1,1,1]"
        " + 12*v[1]*v[1,1]*v[1,1,1,1] - 6*v[1]*v[1,1,1]^2 - 7*v[1,1]^2*v[1,1,1] - v[1,1,1]*v[1,1,1,1,1]"
        " + v[1,1,1,1]^2",
    ))
    c.note("H15 monomial 2*v1111*v11, reference 2*v1111*v1 has scaling weight 7")
    return c.result()


@criterion(4, "closure: nf(dH + 2dL) = nf(dL) = nf(dH) = nf(dOmega) = 0")
def closure():
    c = Checks()
    for name in CORPUS:
        rep = hierarchy(name).check()
        for key, res in rep.residuals.items():
            c(f"{name} {key}", not res)
    return c.result()


@criterion(5, "conservation laws")
def conservation():
    c = Checks()
    h = hierarchy("pkdv123")
    F = form(h, "v[1]*d x1 - v[2]*d x2 + (-v[3] + 2*v[1,1,1] + 6*v[1]^2)*d x3")
    res = conservation_search(AnsatzSpec(3, 4), h)
    c("pKdV F", res.contains(F) and not res.is_trivial(F))

    h = hierarchy("akns1234")
    F = form(
        h,
        "q*r*d x1 + i/2*(q[1]*r - r[1]*q)*d x2 + 1/4*(3*q^2*r^2 + q[1]*r[1] - q[1,1]*r - r[1,1]*q)*d x3"
        " + (i/8*(q*r[1,1,1] - r*q[1,1,1]) + i/8*(q[1,1]*r[1] - q[1]*r[1,1]) + 3*i/4*q*r*(q[1]*r - q*r[1]))*d x4",
    )
    res = conservation_search(AnsatzSpec(3, 4), h)
    c("AKNS F", res.contains(F) and not res.is_trivial(F))
    c("AKNS search under 3 minutes", res.seconds < 180)

    h = hierarchy("pkdv135")
    head = "v[1]*d x1 + (-v[3] + 2*v[1,1,1] + 6*v[1]^2)*d x3"
    reference = form(h, head + " + (-v[5] + 2*v[1,1,1,1,1] + 20*v[1]*v[1,1,1] + 5*v[1,1]^2 + 10*v[1]^2)*d x5")
    derived = form(h, head + " + (-v[5] + 2*v[1,1,1,1,1] + 20*v[1]*v[1,1,1] + 10*v[1,1]^2 + 20*v[1]^3)*d x5")
    res = conservation_search(AnsatzSpec(5, 4), h)
    c("pKdV(1,3,5) derived F", res.contains(derived))
    c("pKdV(1,3,5) reference F not a law", not res.contains(reference))
    c("pKdV(1,3,5) F5 = v5 on shell (oracle)", h.rewrite_system.normal_form(
        derived.coefficient((), (2,)) - expr(h, "v[5]")).is_zero())
    c.note("pKdV(1,3,5) dx5 coefficient: 5*v11^2 -> 10*v11^2 and 10*v1^2 -> 20*v1^3")

    h = hierarchy("sg123")
    F = form(h, "1/2*u[1]^2*d x1 - cos_u*d x2 + (3/8*u[1]^4 + u[1]*u[1,1,1] - 1/2*u[1,1]^2)*d x3")
    res = conservation_search(AnsatzSpec(3, 4, "closed"), h)
    c("sG closed-mode F", res.contains(F) and not res.is_trivial(F))
    return c.result()


@criterion(6, "bracket layer: sG and AKNS single-time brackets, decomposition theorem")
def brackets():
    from test_poisson import akns_brackets, basis, combination, components, sg_symplectic, sine_gordon_brackets, symplectic

    c = Checks()
    rng = random.Random(6)
    h, Om = hierarchy("sg123"), sg_symplectic()
    for _ in range(3):
        P, Q = combination(basis("sg123"), rng), combination(basis("sg123"), rng)
        p, q = components(P, 3), components(Q, 3)
        c("sG {,}_1..3", [single_time_bracket(p[j], q[j], j, Om) for j in range(3)] == sine_gordon_brackets(h, p, q))
    h = hierarchy("akns1234")
    for _ in range(3):
        P, Q = combination(basis("akns1234"), rng), combination(basis("akns1234"), rng)
        p, q = components(P, 4), components(Q, 4)
        b1, b2, b3, b4, b4_last = akns_brackets(h, p, q)
        ours = [single_time_bracket(p[j], q[j], j, h.symplectic) for j in range(4)]
        c("AKNS {,}_1 (uniform sign)", ours[0] == -b1)
        c("AKNS {,}_2", ours[1] == b2)
        c("AKNS {,}_3", ours[2] == b3)
        c("AKNS {,}_4 (consistent omega_4)", ours[3] == -(b4 - 2 * b4_last))
    for name in CORPUS:
        rng = random.Random(100 + CORPUS.index(name))
        ok = 0
        for _ in range(10):
            P, Q = combination(basis(name), rng), combination(basis(name), rng)
            rep = decomposition_check(P, Q, symplectic(name))
            ok += rep.holds and rep.xi_serves_each_component
        c(f"decomposition theorem {name}", ok == 10)
    c.note("AKNS {,}_1 carries the uniform decomposition sign; {,}_4 is taken with omega_4 = delta of the x4 part of Omega1")
    return c.result()


PROPERTY_SUITES = [
    ("test_forms", "test_d_squared_vanishes"),
    ("test_forms", "test_delta_squared_vanishes"),
    ("test_forms", "test_d_and_delta_anticommute"),
    ("test_forms", "test_graded_leibniz"),
    ("test_forms", "test_cartan_formula_for_shift"),
    ("test_forms", "test_total_derivatives_commute"),
    ("test_poisson", "test_bracket_kernel_invariance"),
    ("test_core", "test_gauge_lemma"),
    ("test_poisson", "test_bracket_antisymmetry"),
]


@criterion(7, "property suites, seeded, at least 200 cases each")
def property_suites():
    import importlib

    c = Checks()
    counts = []
    for module, name in PROPERTY_SUITES:
        fn = getattr(importlib.import_module(module), name)
        inner = fn.hypothesis.inner_test
        calls = [0]

        def counted(*a, _inner=inner, **k):
            calls[0] += 1
            return _inner(*a, **k)

        fn.hypothesis.inner_test = counted
        try:
            fn()
            ok = True
        except Exception:  # a falsified property
            ok = False
        finally:
            fn.hypothesis.inner_test = inner
        c(name, ok and calls[0] >= 200)
        counts.append(calls[0])
    c.note(f"cases per suite: min {min(counts)}")
    return c.result()


PERTURBATIONS = {
    "pkdv123": ["v[1]^3*v[1,1]", "v[1,1]^2", "v*v[1]"],
    "pkdv135": ["v[1]^2*v[1,1]", "v[1,1]^2"],
    "sg123": ["u[1]^2*u[2]", "u[1,1]^2"],
    "akns1234": ["q^2*r[1]", "q[1]*r[1]"],
}
CLOSURE_CHECKS = ("dL = 0 on shell", "dH + 2 dL = 0 on shell", "dH = 0 on shell", "dOmega = 0 on shell")


@criterion(8, "negative controls: perturbed L fails a closure identity; v dx1 is not a law")
def negative_controls():
    import tempfile

    c = Checks()
    total = closure_failures = pipeline = other = 0
    with tempfile.TemporaryDirectory() as d:
        path = Path(d) / "perturbed.mf"
        for name, monomials in PERTURBATIONS.items():
            src = corpus_text(name).decode()
            for key in re.findall(r"^(L\[\d,\d\]) = ", src, re.M):
                for m in monomials:
                    path.write_text(src.replace(f"{key} = ", f"{key} = {m} + ", 1))
                    out = io.StringIO()
                    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
                        code = run(["check", str(path)])
                    total += 1
                    failed = {line.split(None, 1)[1].split(":")[0] for line in out.getvalue().splitlines()
                              if line.strip().startswith("FAIL")}
                    if failed & set(CLOSURE_CHECKS):
                        closure_failures += 1
                    elif code == 3:
                        pipeline += 1
                    elif code == 4:
                        other += 1
    c(f"closure identity failed for every perturbation ({closure_failures}/{total})", closure_failures == total)
    c.note(f"{total} perturbations: {closure_failures} closure failures, {pipeline} rejected by the pipeline (exit 3), "
           f"{other} rejected by other checks (exit 4), {total - closure_failures - pipeline - other} accepted")

    h = hierarchy("pkdv123")
    F = form(h, "v*d x1")
    rep = conservation_report(F, h.hamiltonian, h.rewrite_system, h.symplectic)
    c("v dx1 rejected as a conservation law", not rep.conserved)
    return c.result()


@criterion(9, "parser round trip and fuzzing")
def parser():
    from test_parser import _fuzz_inputs, corpus_objects
    from multiform.jet import Algebra

    c = Checks()
    for name in CORPUS:
        s = spec(name)
        c(f"{name} spec", parse_hierarchy(render_spec(s)) == s)
        alg = hierarchy(name).alg
        for label, obj in corpus_objects(name):
            text = render(obj)
            back = parse_form(text, alg) if isinstance(obj, Form) else parse_expr(text, alg)
            c(f"{name} {label}", back == obj)
    rng = random.Random(2024)
    alg = Algebra(["v"], [1, 2])
    bad = 0
    for data in _fuzz_inputs(rng, 10_000):
        try:
            parse_hierarchy(data)
        except ParseError as err:
            if not (isinstance(err.span, SourceSpan) and 0 <= err.span.start <= err.span.end <= len(data)):
                bad += 1
        except Exception:  # any other exception is a crash
            bad += 1
    c("fuzz: 10^4 inputs, only ParseError with in-range spans", bad == 0)
    return c.result()


# ---------------------------------------------------------------------------


def evaluate(number):
    if number not in RESULTS:
        title, fn = CRITERIA[number]
        RESULTS[number] = (title, *fn())
    return RESULTS[number]


def line(number):
    title, ok, detail = RESULTS[number]
    return f"{'PASS' if ok else 'FAIL'} {number} {title}" + (f" -- {detail}" if detail else "")


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_acceptance(number):
    title, ok, detail = evaluate(number)
    print(line(number))
    assert ok, detail


if __name__ == "__main__":
    for n in sorted(CRITERIA):
        evaluate(n)
        print(line(n), flush=True)
