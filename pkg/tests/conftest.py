import functools
import sys

import pytest

from multiform import Hierarchy, parse_expr, parse_form, parse_hierarchy
from multiform.cli import corpus_text

CORPUS = ["pkdv123", "pkdv135", "sg123", "akns1234"]


@functools.lru_cache(maxsize=None)
def spec(name):
    return parse_hierarchy(corpus_text(name))


@functools.lru_cache(maxsize=None)
def hierarchy(name):
    return Hierarchy.from_spec(spec(name))


def expr(h, text):
    return parse_expr(text, h.alg)


def form(h, text):
    return parse_form(text, h.alg)


@pytest.fixture(params=CORPUS)
def corpus_hierarchy(request):
    return hierarchy(request.param)


from hypothesis import settings  # noqa: E402

settings.register_profile("seeded", max_examples=200, derandomize=True, deadline=None)
settings.load_profile("seeded")


@pytest.fixture
def pkdv():
    return hierarchy("pkdv123")


def weights(e, field_weight, label_weight):
    """Set of scaling weights of the monomials of e (singleton when homogeneous)."""
    alg = e.alg
    out = set()
    for m in e.terms:
        w = 0
        for v, k in m:
            if v[0] == 0:
                w += k * (field_weight + sum(c * label_weight[alg.labels[p]] for p, c in enumerate(v[2])))
        out.add(w)
    return out


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(n))
