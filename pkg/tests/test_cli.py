import io
import json
from contextlib import redirect_stderr, redirect_stdout

import jsonschema
import pytest

from multiform.cli import CORPUS, REPORT_SCHEMA, corpus_text, run

N2 = "hierarchy pkdv12;\ndirections x1 .. x2;\nfield v;\nL[1,2] = v[1]*v[2];\n"


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = run(list(argv))
    return code, out.getvalue(), err.getvalue()


def report(*argv):
    code, out, _ = invoke(*argv, "--format", "json")
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    return code, doc


@pytest.fixture
def mf(tmp_path):
    def write(text, name="h.mf"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


def perturbed(name, key, monomial):
    lines = []
    for line in corpus_text(name).decode().splitlines():
        if line.startswith(f"L[{key}] = "):
            line = line.replace(" = ", f" = {monomial} + ", 1)
        lines.append(line)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def test_el_pkdv():
    code, doc = report("el", "@pkdv123")
    assert code == 0 and doc["ok"]
    assert [o["text"] for o in doc["objects"]] == ["v[2] = 0", "v[3] = 3*v[1]^2 + v[1,1,1]"]


def test_el_empty_lagrangian(mf):
    code, doc = report("el", mf("directions x1 .. x2;\nfield v;\n"))
    assert code == 0 and doc["objects"] == []


def test_el_sine_gordon():
    code, doc = report("el", "@sg123")
    texts = [o["text"] for o in doc["objects"]]
    assert code == 0
    assert "u[1,2] = sin_u" in texts


def test_derive_reports_all_objects():
    code, doc = report("derive", "@pkdv123")
    names = [o["name"] for o in doc["objects"]]
    assert code == 0
    assert names == ["Omega1", "H[1,2]", "H[1,3]", "H[2,3]", "omega[1]", "omega[2]", "omega[3]"]
    h13 = next(o for o in doc["objects"] if o["name"] == "H[1,3]")
    assert h13["text"] == "-4*v[1]^3 + v[1]*v[3] - 2*v[1]*v[1,1,1] + v[1,1]^2"


@pytest.mark.parametrize("name", CORPUS)
def test_check_corpus_green(name):
    code, doc = report("check", f"@{name}")
    assert code == 0 and doc["ok"]
    statuses = {c["name"]: c["status"] for c in doc["checks"]}
    for key in ("dL = 0 on shell", "dH + 2 dL = 0 on shell", "dH = 0 on shell", "dOmega = 0 on shell"):
        assert statuses[key] == "pass"


def test_check_two_directions(mf):
    code, doc = report("check", mf(N2))
    assert code == 0
    assert any(c["name"].startswith("dF = i_xi dH") and c["status"] == "pass" for c in doc["checks"])


@pytest.mark.parametrize(
    "name, key, monomial",
    [("pkdv123", "1,3", "v[1,1]^2"), ("pkdv123", "1,2", "v*v[1]"), ("akns1234", "1,2", "q[1]*r[1]")],
)
def test_check_rejects_perturbations(mf, name, key, monomial):
    code, out, err = invoke("check", mf(perturbed(name, key, monomial)))
    assert code in (3, 4)
    if code == 4:
        assert "FAIL" in out


def test_conslaw_pkdv():
    code, doc = report("conslaw", "@pkdv123", "--order", "3", "--degree", "4")
    assert code == 0 and len(doc["objects"]) >= 1


def test_bracket_of_a_form_with_itself_vanishes():
    P = "v[1]*d x1 - v[2]*d x2 + (-v[3] + 2*v[1,1,1] + 6*v[1]^2)*d x3"
    code, doc = report("bracket", "@pkdv123", "--lhs", P, "--rhs", P)
    assert code == 0
    assert next(o for o in doc["objects"] if o["name"] == "{|lhs, rhs|}")["text"] == "0"
    assert any(c["name"] == "decomposition into single-time brackets" for c in doc["checks"])


def test_bracket_not_hamiltonian_exits_4():
    code, doc = report("bracket", "@pkdv123", "--lhs", "v[2]*d x1", "--rhs", "v[1]*d x1")
    assert code == 4 and not doc["ok"]


def test_single_time_bracket():
    code, doc = report("bracket", "@sg123", "--lhs", "u[1]^2", "--rhs", "cos_u", "--time", "1")
    assert code == 0
    assert doc["objects"][0]["name"] == "{lhs, rhs}_1"


# ---------------------------------------------------------------------------
# exit codes and diagnostics


def test_usage_errors_exit_1():
    assert invoke("bogus")[0] == 1
    assert invoke("check", "/nonexistent/file.mf")[0] == 1
    assert invoke("el", "@nosuch")[0] == 1
    assert invoke("bracket", "@sg123", "--lhs", "u", "--rhs", "u", "--time", "7")[0] == 1


def test_parse_error_exit_2(mf):
    code, out, err = invoke("el", mf("directions x1 .. x2;\nfield v;\nL[1,2] = w;\n"))
    assert code == 2 and out == ""
    assert "parse error" in err and "bytes" in err


def test_pipeline_error_exit_3(mf):
    # L[1,2] + v[2] is not closed in three directions
    code, out, err = invoke("el", mf(perturbed("pkdv123", "1,2", "v[2]")))
    assert code == 3
    assert "NonDecomposable" in err or "NonOrientable" in err


# ---------------------------------------------------------------------------
# reports


def test_seed_reproducibility():
    def strip(doc):
        doc.pop("timing")
        return doc

    a = strip(report("check", "@pkdv123", "--seed", "7")[1])
    b = strip(report("check", "@pkdv123", "--seed", "7")[1])
    c = strip(report("check", "@pkdv123", "--seed", "8")[1])
    assert a == b and a["seed"] == 7
    assert a != c


def test_text_and_json_agree_on_statuses():
    _, out, _ = invoke("check", "@sg123")
    _, doc = report("check", "@sg123")
    text = [line.split()[0] for line in out.splitlines() if line.strip().startswith(("PASS", "FAIL"))]
    assert text == [c["status"].upper() for c in doc["checks"]]
    assert "(seed 0)" in out.splitlines()[0]


def test_latex_format():
    code, out, _ = invoke("derive", "@pkdv123", "--format", "latex")
    assert code == 0
    assert "\\begin{align*}" in out and "v_{1}v_{2}" in out


def test_color_env(monkeypatch):
    monkeypatch.setenv("MULTIFORM_COLOR", "1")
    assert "\x1b[" in invoke("check", "@pkdv123")[1]
    monkeypatch.setenv("MULTIFORM_COLOR", "0")
    assert "\x1b[" not in invoke("check", "@pkdv123")[1]


def test_schema_command_matches_shipped_schema():
    code, out, _ = invoke("schema")
    assert code == 0 and json.loads(out) == REPORT_SCHEMA


# ---------------------------------------------------------------------------
# corpus


def test_corpus_list():
    assert invoke("corpus", "list")[1].split() == list(CORPUS)


def test_corpus_export(tmp_path):
    code, out, _ = invoke("corpus", "export", "sg123")
    assert code == 0 and out.encode() == corpus_text("sg123")
    code, out, _ = invoke("corpus", "export", "-o", str(tmp_path))
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == sorted(f"{n}.mf" for n in CORPUS)
    assert (tmp_path / "akns1234.mf").read_bytes() == corpus_text("akns1234")
