"""Finite conditional lattices: validation, validity, homomorphisms, residuals."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterator, Mapping, Sequence

from .semilattice import Semilattice, Violation
from .syntax import And, Bot, ConsequencePair, Cto, Formula, Or, Prop, Top, atoms

__all__ = [
    "ConditionalLattice", "validate_conditional_lattice", "algebra_eval",
    "algebra_validates", "algebra_refutation", "is_homomorphism",
    "heyting_residual", "search_residual_table", "lattice_from_semilattice",
    "meet_preserving_maps", "enumerate_cto_tables", "sample_cto_tables",
    "with_cto",
]


@dataclass(frozen=True, eq=False)
class ConditionalLattice:
    """A finite lattice given by meet/join tables, with a ``⊸`` table."""

    names: tuple[str, ...]
    top: int
    bot: int
    meet: tuple[tuple[int, ...], ...]
    join: tuple[tuple[int, ...], ...]
    cto: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.names)
        if n == 0:
            raise ValueError("empty carrier")
        for tab in (self.meet, self.join, self.cto):
            if len(tab) != n or any(len(r) != n for r in tab):
                raise ValueError("tables must be n x n")
            if any(not 0 <= v < n for r in tab for v in r):
                raise ValueError("table entry out of range")
        for attr in ("meet", "join", "cto"):
            object.__setattr__(self, attr, tuple(tuple(r) for r in getattr(self, attr)))
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def n(self) -> int:
        return len(self.names)

    def leq(self, a: int, b: int) -> bool:
        return self.meet[a][b] == a

    @cached_property
    def meet_semilattice(self) -> Semilattice:
        return Semilattice(self.names, self.top, self.meet)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConditionalLattice):
            return NotImplemented
        return (self.names, self.top, self.bot, self.meet, self.join, self.cto) == (
            other.names, other.top, other.bot, other.meet, other.join, other.cto)

    def __hash__(self) -> int:
        return hash((self.names, self.meet, self.join, self.cto))

    def __repr__(self) -> str:
        return f"ConditionalLattice(n={self.n}, names={self.names!r})"


def with_cto(lat: ConditionalLattice, cto: Sequence[Sequence[int]]) -> ConditionalLattice:
    return ConditionalLattice(lat.names, lat.top, lat.bot, lat.meet, lat.join,
                              tuple(map(tuple, cto)))


def lattice_from_semilattice(s: Semilattice, cto: Sequence[Sequence[int]] | None = None,
                             ) -> ConditionalLattice:
    """The lattice of a finite meet-semilattice with top; ``⊸`` defaults to top.

    Joins are meets of common upper bounds.
    """
    n = s.n
    bots = [b for b in range(n) if all(s.leq(b, x) for x in range(n))]
    if not bots:
        raise ValueError("semilattice has no bottom")
    join = []
    for x in range(n):
        row = []
        for y in range(n):
            ub = [z for z in range(n) if s.leq(x, z) and s.leq(y, z)]
            j = ub[0]
            for z in ub[1:]:
                j = s.meet[j][z]
            row.append(j)
        join.append(tuple(row))
    if cto is None:
        cto = [[s.top] * n for _ in range(n)]
    return ConditionalLattice(s.names, s.top, bots[0], s.meet, tuple(join),
                              tuple(map(tuple, cto)))


def validate_conditional_lattice(a: ConditionalLattice) -> list[Violation]:
    out = []
    n, m, j, c, nm = a.n, a.meet, a.join, a.cto, a.names
    for x in range(n):
        if m[x][x] != x or j[x][x] != x:
            out.append(Violation("idempotence", (nm[x],)))
        if m[x][a.top] != x or j[x][a.bot] != x:
            out.append(Violation("bounds", (nm[x],)))
        if c[x][a.top] != a.top:
            out.append(Violation("cto-top", (nm[x],)))
        for y in range(n):
            if x < y and (m[x][y] != m[y][x] or j[x][y] != j[y][x]):
                out.append(Violation("commutativity", (nm[x], nm[y])))
            if m[x][j[x][y]] != x or j[x][m[x][y]] != x:
                out.append(Violation("absorption", (nm[x], nm[y])))
            for z in range(n):
                if m[m[x][y]][z] != m[x][m[y][z]] or j[j[x][y]][z] != j[x][j[y][z]]:
                    out.append(Violation("associativity", (nm[x], nm[y], nm[z])))
                if m[c[x][y]][c[x][z]] != c[x][m[y][z]]:
                    out.append(Violation("cto-meet", (nm[x], nm[y], nm[z])))
    return out


def algebra_eval(a: ConditionalLattice, sigma: Mapping[str, int], f: Formula) -> int:
    if isinstance(f, Prop):
        return sigma[f.name]
    if isinstance(f, Top):
        return a.top
    if isinstance(f, Bot):
        return a.bot
    x, y = algebra_eval(a, sigma, f.left), algebra_eval(a, sigma, f.right)
    if isinstance(f, And):
        return a.meet[x][y]
    if isinstance(f, Or):
        return a.join[x][y]
    return a.cto[x][y]


def algebra_refutation(a: ConditionalLattice, cp: ConsequencePair) -> dict[str, int] | None:
    names = atoms(cp.lhs, cp.rhs)
    for vals in product(range(a.n), repeat=len(names)):
        sigma = dict(zip(names, vals))
        if not a.leq(algebra_eval(a, sigma, cp.lhs), algebra_eval(a, sigma, cp.rhs)):
            return sigma
    return None


def algebra_validates(a: ConditionalLattice, cp: ConsequencePair) -> bool:
    return algebra_refutation(a, cp) is None


def is_homomorphism(h: Sequence[int], a: ConditionalLattice, b: ConditionalLattice) -> bool:
    """Whether ``h`` preserves bounds, meet, join and ``⊸``."""
    if len(h) != a.n or any(not 0 <= v < b.n for v in h):
        return False
    if h[a.top] != b.top or h[a.bot] != b.bot:
        return False
    for x in range(a.n):
        for y in range(a.n):
            if (h[a.meet[x][y]] != b.meet[h[x]][h[y]]
                    or h[a.join[x][y]] != b.join[h[x]][h[y]]
                    or h[a.cto[x][y]] != b.cto[h[x]][h[y]]):
                return False
    return True


def heyting_residual(a: ConditionalLattice) -> tuple[tuple[int, ...], ...] | None:
    """Relative pseudocomplement table ``x -> y = max{z : z ∧ x ≤ y}``, if total."""
    table = []
    for x in range(a.n):
        row = []
        for y in range(a.n):
            cands = [z for z in range(a.n) if a.leq(a.meet[z][x], y)]
            best = [m for m in cands if all(a.leq(z, m) for z in cands)]
            if not best:
                return None
            row.append(best[0])
        table.append(tuple(row))
    return tuple(table)


def search_residual_table(a: ConditionalLattice) -> tuple[tuple[tuple[int, ...], ...] | None, int]:
    """Backtracking search over all ``n×n`` tables ``r`` with residuation.

    A table is accepted when ``z ∧ x ≤ y`` iff ``z ≤ r(x, y)`` for all
    ``x, y, z``.  Returns the first table found (or None) and the number of
    cell assignments tried.
    """
    n = a.n
    cells = [(x, y) for x in range(n) for y in range(n)]
    table = [[-1] * n for _ in range(n)]
    tried = 0

    def cell_ok(x: int, y: int, r: int) -> bool:
        return all(a.leq(a.meet[z][x], y) == a.leq(z, r) for z in range(n))

    def go(k: int) -> bool:
        nonlocal tried
        if k == len(cells):
            return True
        x, y = cells[k]
        for r in range(n):
            tried += 1
            if cell_ok(x, y, r):
                table[x][y] = r
                if go(k + 1):
                    return True
        table[x][y] = -1
        return False

    found = go(0)
    return (tuple(map(tuple, table)) if found else None), tried


def meet_preserving_maps(lat: ConditionalLattice) -> list[tuple[int, ...]]:
    """All maps ``f`` with ``f(top) = top`` and ``f(b ∧ c) = f(b) ∧ f(c)``."""
    n = lat.n
    # top-down: fewest upper bounds first, so top comes first
    order = sorted(range(n), key=lambda x: sum(lat.leq(x, y) for y in range(n)))
    out = []
    f = [-1] * n

    def consistent(k: int) -> bool:
        assigned = order[:k + 1]
        for i, y in enumerate(assigned):
            for z in assigned[i:]:
                m = lat.meet[y][z]
                if f[m] != -1 and f[m] != lat.meet[f[y]][f[z]]:
                    return False
        return True

    def go(k: int) -> None:
        if k == n:
            out.append(tuple(f))
            return
        x = order[k]
        choices = [lat.top] if x == lat.top else range(n)
        for v in choices:
            f[x] = v
            if consistent(k):
                go(k + 1)
        f[x] = -1

    go(0)
    return sorted(out)


def enumerate_cto_tables(lat: ConditionalLattice, max_n: int = 4) -> Iterator[ConditionalLattice]:
    """Every ``⊸`` table satisfying the conditional-lattice laws on ``lat``.

    Each row ``b ↦ a ⊸ b`` is independently any top- and meet-preserving map.
    """
    if lat.n > max_n:
        raise ValueError(f"exhaustive enumeration limited to n <= {max_n}")
    rows = meet_preserving_maps(lat)
    for table in product(rows, repeat=lat.n):
        yield with_cto(lat, table)


def sample_cto_tables(lat: ConditionalLattice, k: int, seed: int = 0) -> list[ConditionalLattice]:
    rng = random.Random(seed)
    rows = meet_preserving_maps(lat)
    return [with_cto(lat, [rng.choice(rows) for _ in range(lat.n)]) for _ in range(k)]
