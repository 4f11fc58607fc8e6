from __future__ import annotations

from itertools import product

import pytest

from conftest import chain, d4, m3f, n5
from oracles import brute_residual_exists
from selframe.algebra import (
    ConditionalLattice, algebra_refutation, algebra_validates, enumerate_cto_tables,
    heyting_residual, is_homomorphism, lattice_from_semilattice, meet_preserving_maps,
    sample_cto_tables, search_residual_table, validate_conditional_lattice, with_cto,
)
from selframe.frame import GeneralFrame, complex_algebra, validates
from selframe.search import enumerate_semilattices, generate_selections
from selframe.syntax import parse_pair

DIST = parse_pair("p /\\ (q \\/ r) |- (p /\\ q) \\/ (p /\\ r)")


def test_trivial_cto_valid():
    c2 = lattice_from_semilattice(chain(2))
    assert validate_conditional_lattice(c2) == []
    broken = [list(r) for r in c2.cto]
    broken[c2.top][c2.top] = c2.bot
    laws = {v.law for v in validate_conditional_lattice(with_cto(c2, broken))}
    assert "cto-top" in laws
    assert validate_conditional_lattice(lattice_from_semilattice(m3f())) == []


def test_algebra_validity():
    m3 = lattice_from_semilattice(m3f())
    assert not algebra_validates(m3, DIST)
    assert algebra_refutation(m3, DIST) is not None
    for lat in (m3, lattice_from_semilattice(d4())):
        assert algebra_validates(lat, parse_pair("F |- p"))
        assert algebra_validates(lat, parse_pair("(p ~> q) /\\ (p ~> r) |- p ~> (q /\\ r)"))


def test_homomorphisms():
    lat = lattice_from_semilattice(d4())
    assert is_homomorphism(tuple(range(4)), lat, lat)
    c2 = lattice_from_semilattice(chain(2))
    assert not is_homomorphism((c2.top,) * 4, lat, c2)
    assert not is_homomorphism((0, 1), lat, c2)


def test_heyting_residual():
    c2 = lattice_from_semilattice(chain(2))
    r = heyting_residual(c2)
    t, b = c2.top, c2.bot
    assert r[t][t] == t and r[t][b] == b and r[b][t] == t and r[b][b] == t
    assert heyting_residual(lattice_from_semilattice(d4())) is not None
    assert heyting_residual(lattice_from_semilattice(m3f())) is None
    assert heyting_residual(lattice_from_semilattice(n5())) is None


@pytest.mark.parametrize("s", [chain(3), d4(), m3f(), n5()] + enumerate_semilattices(5),
                         ids=lambda s: f"n{s.n}")
def test_residual_search_matches_oracle(s):
    lat = lattice_from_semilattice(s)
    table, tried = search_residual_table(lat)
    assert (table is not None) == brute_residual_exists(lat) == (heyting_residual(lat) is not None)
    assert tried > 0


def test_meet_preserving_maps_by_brute_force():
    for s in (chain(3), d4(), chain(4)):
        lat = lattice_from_semilattice(s)
        brute = [f for f in product(range(lat.n), repeat=lat.n)
                 if f[lat.top] == lat.top
                 and all(f[lat.meet[x][y]] == lat.meet[f[x]][f[y]]
                         for x in range(lat.n) for y in range(lat.n))]
        assert meet_preserving_maps(lat) == sorted(brute)


def test_cto_tables_valid():
    lat = lattice_from_semilattice(chain(3))
    tables = list(enumerate_cto_tables(lat))
    assert len(tables) == 6 ** 3
    assert all(validate_conditional_lattice(a) == [] for a in tables)
    with pytest.raises(ValueError):
        next(enumerate_cto_tables(lattice_from_semilattice(m3f())))
    assert all(validate_conditional_lattice(a) == []
               for a in sample_cto_tables(lattice_from_semilattice(m3f()), 20, seed=3))


@pytest.mark.parametrize("s", [chain(2), chain(3), d4(), m3f()], ids=lambda s: f"n{s.n}")
def test_frame_and_algebra_validity_agree(s):
    pairs = [DIST, parse_pair("p /\\ (p ~> q) |- q"), parse_pair("T |- p ~> p"),
             parse_pair("(p ~> q) /\\ (q ~> r) |- p ~> r")]
    sels = list(generate_selections(s, strategy="named"))
    sels += list(generate_selections(s, strategy="sampled", seed=2, k=15))
    for sel in sels:
        g = GeneralFrame(s, s.filters, sel)
        ca = complex_algebra(g)
        for cp in pairs:
            assert validates(g, cp) == algebra_validates(ca, cp)


def test_distributive_complex_algebras_are_heyting():
    for s in (chain(3), d4(), chain(4)):
        for sel in generate_selections(s, strategy="sampled", seed=5, k=20):
            ca = complex_algebra(GeneralFrame(s, s.filters, sel))
            assert heyting_residual(ca) is not None


def test_bad_tables_rejected():
    with pytest.raises(ValueError):
        ConditionalLattice(("1",), 0, 0, ((0,),), ((0,),), ((1,),))
