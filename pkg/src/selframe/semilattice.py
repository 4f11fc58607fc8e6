"""Finite meet-semilattices with top, their filters and the filter join.

Elements are dense indices ``0..n-1``.  A filter (or any subset) is encoded
as an ``int`` bitmask: bit ``i`` set means element ``i`` is a member.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

__all__ = [
    "Violation", "Semilattice", "members", "mask_of", "popcount",
    "validate_semilattice", "leq", "enumerate_filters", "principal_upset",
    "filter_join", "filter_join_all", "is_distributive",
    "distributivity_witness", "hms_check", "is_filter",
]


@dataclass(frozen=True)
class Violation:
    """One failed law in a validation report, with a witnessing tuple."""

    law: str
    witness: tuple

    def __str__(self) -> str:
        return f"{self.law}: {self.witness}"


def members(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(elems: Iterable[int]) -> int:
    m = 0
    for e in elems:
        m |= 1 << e
    return m


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True, eq=False)
class Semilattice:
    """A finite meet-semilattice ``(X, 1, meet)``.

    ``meet[x][y]`` is the index of ``x ⋏ y``; ``top`` is the index of 1.
    Construction does not check the laws; use :func:`validate_semilattice`.
    """

    names: tuple[str, ...]
    top: int
    meet: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.names)
        if n == 0:
            raise ValueError("a semilattice needs at least its top element")
        if len(set(self.names)) != n:
            raise ValueError("element names must be distinct")
        if not 0 <= self.top < n:
            raise ValueError("top index out of range")
        if len(self.meet) != n or any(len(row) != n for row in self.meet):
            raise ValueError("meet table must be n x n")
        if any(not 0 <= v < n for row in self.meet for v in row):
            raise ValueError("meet table entry out of range")
        object.__setattr__(self, "meet", tuple(tuple(r) for r in self.meet))
        object.__setattr__(self, "names", tuple(self.names))

    @classmethod
    def from_order(cls, names: Sequence[str], leq_pairs: Iterable[tuple[int, int]]):
        """Build from a partial order given by pairs ``(x, y)`` meaning x ≼ y.

        The reflexive-transitive closure is taken; raises if some pair has no
        greatest lower bound or there is no top.
        """
        n = len(names)
        le = [[i == j for j in range(n)] for i in range(n)]
        for x, y in leq_pairs:
            le[x][y] = True
        for k in range(n):
            for i in range(n):
                if le[i][k]:
                    for j in range(n):
                        if le[k][j]:
                            le[i][j] = True
        tops = [t for t in range(n) if all(le[x][t] for x in range(n))]
        if len(tops) != 1:
            raise ValueError("order has no unique top")
        meet = [[0] * n for _ in range(n)]
        for x in range(n):
            for y in range(n):
                lower = [z for z in range(n) if le[z][x] and le[z][y]]
                glb = [z for z in lower if all(le[w][z] for w in lower)]
                if len(glb) != 1:
                    raise ValueError(f"no meet for {names[x]}, {names[y]}")
                meet[x][y] = glb[0]
        return cls(tuple(names), tops[0], tuple(map(tuple, meet)))

    @property
    def n(self) -> int:
        return len(self.names)

    @cached_property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def top_mask(self) -> int:
        return 1 << self.top

    @cached_property
    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    @cached_property
    def up(self) -> tuple[int, ...]:
        """``up[x]`` is the mask of ``{y : x ≼ y}``."""
        return tuple(
            mask_of(y for y in range(self.n) if self.meet[x][y] == x)
            for x in range(self.n)
        )

    @cached_property
    def down(self) -> tuple[int, ...]:
        return tuple(
            mask_of(y for y in range(self.n) if self.meet[y][x] == y)
            for x in range(self.n)
        )

    @cached_property
    def filters(self) -> tuple[int, ...]:
        return tuple(enumerate_filters(self))

    @cached_property
    def _join_cache(self) -> dict[tuple[int, int], int]:
        return {}

    def leq(self, x: int, y: int) -> bool:
        return self.meet[x][y] == x

    def upclose(self, mask: int) -> int:
        out = 0
        for x in members(mask):
            out |= self.up[x]
        return out

    def generator(self, fmask: int) -> int:
        """The least element of a nonempty meet-closed set (its meet)."""
        it = iter(members(fmask))
        g = next(it)
        for x in it:
            g = self.meet[g][x]
        return g

    def join(self, p: int, q: int) -> int:
        """Filter join without input validation; memoized."""
        key = (p, q) if p <= q else (q, p)
        cache = self._join_cache
        r = cache.get(key)
        if r is None:
            meets = 0
            mp, mq = members(p), members(q)
            for x in mp:
                row = self.meet[x]
                for y in mq:
                    meets |= 1 << row[y]
            r = self.upclose(meets)
            cache[key] = r
        return r

    def show(self, mask: int) -> str:
        return "{" + ",".join(self.names[i] for i in members(mask)) + "}"

    def names_of(self, mask: int) -> list[str]:
        return [self.names[i] for i in members(mask)]

    def mask_from_names(self, names: Iterable[str]) -> int:
        try:
            return mask_of(self.index[nm] for nm in names)
        except KeyError as e:
            raise ValueError(f"unknown element {e.args[0]!r}") from None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Semilattice):
            return NotImplemented
        return (self.names, self.top, self.meet) == (other.names, other.top, other.meet)

    def __hash__(self) -> int:
        return hash((self.names, self.top, self.meet))

    def __repr__(self) -> str:
        return f"Semilattice(names={self.names!r}, top={self.names[self.top]!r})"


def validate_semilattice(s: Semilattice) -> list[Violation]:
    out = []
    n, m = s.n, s.meet
    for x in range(n):
        if m[x][x] != x:
            out.append(Violation("idempotence", (s.names[x],)))
        if m[x][s.top] != x or m[s.top][x] != x:
            out.append(Violation("top", (s.names[x],)))
        for y in range(n):
            if m[x][y] != m[y][x] and x < y:
                out.append(Violation("commutativity", (s.names[x], s.names[y])))
            for z in range(n):
                if m[m[x][y]][z] != m[x][m[y][z]]:
                    out.append(Violation("associativity",
                                         (s.names[x], s.names[y], s.names[z])))
    return out


def leq(s: Semilattice, x: int, y: int) -> bool:
    return s.meet[x][y] == x


def is_filter(s: Semilattice, mask: int) -> bool:
    if not mask & s.top_mask or mask & ~s.all_mask:
        return False
    ms = members(mask)
    for x in ms:
        if s.up[x] & ~mask:
            return False
    for x in ms:
        for y in ms:
            if not (mask >> s.meet[x][y]) & 1:
                return False
    return True


def enumerate_filters(s: Semilattice) -> list[int]:
    """All filters, ordered by size then by member indices.

    In a finite semilattice every filter contains the meet of its members
    and is therefore the principal upset of that element, so the filters are
    exactly the ``n`` principal upsets.
    """
    return sorted(set(s.up), key=lambda m: (popcount(m), members(m)))


def principal_upset(s: Semilattice, x: int) -> int:
    return s.up[x]


def _check_filter(s: Semilattice, mask: int) -> None:
    if not is_filter(s, mask):
        raise ValueError(f"{s.show(mask)} is not a filter")


def filter_join(s: Semilattice, p: int, q: int) -> int:
    """``↑{x ⋏ y : x ∈ p, y ∈ q}``, the least filter containing both."""
    _check_filter(s, p)
    _check_filter(s, q)
    return s.join(p, q)


def filter_join_all(s: Semilattice, qs: Iterable[int]) -> int:
    out = s.top_mask
    for q in qs:
        out = filter_join(s, out, q)
    return out


def distributivity_witness(s: Semilattice) -> tuple[int, int, int] | None:
    """A triple ``(x, y, z)`` with x⋏y ≼ z but no u ≽ x, v ≽ y with u⋏v = z."""
    n = s.n
    for x, y, z in product(range(n), repeat=3):
        if not s.leq(s.meet[x][y], z):
            continue
        ups_x, ups_y = members(s.up[x]), members(s.up[y])
        if not any(s.meet[u][v] == z for u in ups_x for v in ups_y):
            return (x, y, z)
    return None


def is_distributive(s: Semilattice) -> bool:
    return distributivity_witness(s) is None


def hms_check(s: Semilattice, family: Iterable[int]) -> bool:
    """Whether every ``x ⋠ y`` is separated by a member of ``family``."""
    fam = list(family)
    for x in range(s.n):
        for y in range(s.n):
            if s.leq(x, y):
                continue
            if not any((a >> x) & 1 and not (a >> y) & 1 for a in fam):
                return False
    return True
