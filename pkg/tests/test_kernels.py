import os
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from conftest import perms
from permchain import kernels

BACKENDS = kernels.backends()
pytestmark = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
py, cy = BACKENDS.get("python"), BACKENDS.get("cython")


def test_compiled_backend_selected():
    assert kernels.BACKEND == "cython"


def test_pure_override():
    out = subprocess.run(
        [sys.executable, "-c", "from permchain import kernels; print(kernels.BACKEND)"],
        env={**os.environ, "PERMCHAIN_PURE": "1"}, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@given(st.lists(st.integers(-50, 50), unique=True, max_size=12))
def test_flatten(word):
    assert py.flatten(word) == cy.flatten(word)


@given(perms(1, 10), perms(1, 6))
def test_find_occurrence(host, pattern):
    assert py.find_occurrence(host, pattern) == cy.find_occurrence(host, pattern)


@given(perms(1, 10))
def test_deletions(p):
    assert py.deletions(bytes(p)) == cy.deletions(bytes(p))


def _marked(p, marks):
    return bytes(v | (kernels.MARK if m else 0) for v, m in zip(p, marks))


@given(st.lists(perms(1, 6), min_size=1, max_size=4), st.data())
def test_marked_children(ps, data):
    layer = {}
    for p in ps:
        marks = data.draw(st.lists(st.booleans(), min_size=len(p), max_size=len(p)))
        layer[_marked(p, marks)] = data.draw(st.integers(4, 9))
    out_py, out_cy = {}, {}
    py.marked_children(layer, out_py)
    cy.marked_children(layer, out_cy)
    assert out_py == out_cy


@given(perms(1, 5), st.data())
def test_inflate_marked(p, data):
    marks = data.draw(st.lists(st.booleans(), min_size=len(p), max_size=len(p)))
    rho = _marked(p, marks)
    fills = [(b"\x02\x01", 0), (b"\x01\x02\x03", 1)]
    ends = [b"\x01", b"\x01\x02"]
    budget = data.draw(st.integers(0, 3))
    n_max = data.draw(st.integers(1, 14))
    outs_py = [set() for _ in range(n_max + 1)]
    outs_cy = [set() for _ in range(n_max + 1)]
    e_py = py.inflate_marked(rho, fills, ends, budget, n_max, outs_py)
    e_cy = cy.inflate_marked(rho, fills, ends, budget, n_max, outs_cy)
    assert e_py == e_cy and outs_py == outs_cy


@given(perms(1, 5), st.data())
def test_inflate(q, data):
    blocks = [data.draw(perms(1, 3)) for _ in q]
    assert py.inflate(q, blocks) == cy.inflate(q, blocks)


@given(st.lists(perms(1, 4), max_size=6), st.lists(perms(1, 4), max_size=6))
def test_sum_into(a, b):
    left = {bytes(p) for p in a}
    right = {bytes(p) for p in b}
    out_py, out_cy = set(), set()
    py.sum_into(left, right, out_py)
    cy.sum_into(left, right, out_cy)
    assert out_py == out_cy


@given(st.lists(perms(2, 5), max_size=5), st.lists(perms(1, 4), max_size=30), st.lists(perms(1, 4), max_size=3))
def test_first_unclosed(members, lower, excluded):
    members = [bytes(p) for p in members]
    lower = ({bytes(p) for p in lower},)
    excluded = {bytes(p) for p in excluded}
    assert py.first_unclosed(members, lower, excluded) == cy.first_unclosed(members, lower, excluded)
