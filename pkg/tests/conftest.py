from __future__ import annotations

import pytest
from hypothesis import strategies as st

from selframe.frame import GeneralFrame
from selframe.semilattice import Semilattice
from selframe.syntax import BOT, TOP, And, Cto, Or, Prop


def make(names, pairs):
    idx = {nm: i for i, nm in enumerate(names)}
    return Semilattice.from_order(names, [(idx[x], idx[y]) for x, y in pairs])


def chain(n: int) -> Semilattice:
    names = ["1"] + [chr(ord("a") + i) for i in range(n - 2)] + (["0"] if n > 1 else [])
    return make(names, [(names[i + 1], names[i]) for i in range(n - 1)])


def d4() -> Semilattice:
    return make(["1", "a", "b", "0"], [("a", "1"), ("b", "1"), ("0", "a"), ("0", "b")])


def m3f() -> Semilattice:
    return make(["1", "a", "b", "c", "0"],
                [("a", "1"), ("b", "1"), ("c", "1"), ("0", "a"), ("0", "b"), ("0", "c")])


def n5() -> Semilattice:
    return make(["1", "a", "b", "c", "0"],
                [("a", "1"), ("c", "1"), ("b", "a"), ("0", "b"), ("0", "c")])


def up(s: Semilattice, name: str) -> int:
    return s.up[s.index[name]]


@pytest.fixture
def C2():
    return chain(2)


@pytest.fixture
def D4():
    return d4()


@pytest.fixture
def M3f():
    return m3f()


def full(s: Semilattice, kind: str) -> GeneralFrame:
    return GeneralFrame.build(s, kind)


ATOMS = ("p", "q", "r")


def formulas(atoms=ATOMS, max_leaves: int = 12):
    leaves = st.sampled_from([Prop(a) for a in atoms] + [TOP, BOT])
    return st.recursive(
        leaves,
        lambda sub: st.builds(And, sub, sub) | st.builds(Or, sub, sub) | st.builds(Cto, sub, sub),
        max_leaves=max_leaves,
    )


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
