"""General selection frames, models, evaluation and selection morphisms."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Callable, Iterator, Mapping, Sequence

from .semilattice import Semilattice, Violation, is_filter, members
from .syntax import (
    And, Bot, ConsequencePair, Cto, Formula, Or, Prop, Top, atoms, TOP, BOT,
)

__all__ = [
    "GeneralFrame", "Model", "BudgetExceeded", "UnknownAtom",
    "SELECTION_KINDS", "named_selection",
    "validate_frame", "eval_formula", "validates", "find_refutation",
    "complex_algebra", "check_s_genfil", "check_selection_morphism",
    "truth_preservation_test", "truth_preservation_counterexample",
    "compile_formula", "run_compiled",
]

DEFAULT_BUDGET = 10 ** 7

SelectionFn = Callable[[Semilattice, int, int], int]


def _constant_top(s: Semilattice, x: int, a: int) -> int:
    return s.top_mask


def _identity(s: Semilattice, x: int, a: int) -> int:
    # s(1, a) must be {1}
    return s.top_mask if x == s.top else a


def _principal_int(s: Semilattice, x: int, a: int) -> int:
    return a & s.up[x]


def _principal_up(s: Semilattice, x: int, a: int) -> int:
    return s.up[x]


SELECTION_KINDS: dict[str, SelectionFn] = {
    "constant-top": _constant_top,
    "identity": _identity,
    "principal-int": _principal_int,
    "principal-up": _principal_up,
}


def named_selection(kind: str) -> SelectionFn:
    try:
        return SELECTION_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown selection kind {kind!r}") from None


@dataclass(frozen=True, eq=False)
class GeneralFrame:
    """A semilattice, an admissible filter family and a selection table.

    ``selection[a][x]`` is ``s(x, a)`` for every admissible ``a``.
    """

    base: Semilattice
    admissible: tuple[int, ...]
    selection: Mapping[int, tuple[int, ...]] = field(repr=False)

    def __post_init__(self) -> None:
        adm = tuple(sorted(set(self.admissible),
                           key=lambda m: (bin(m).count("1"), members(m))))
        object.__setattr__(self, "admissible", adm)
        sel = {a: tuple(self.selection[a]) for a in adm}
        if set(self.selection) != set(adm):
            raise ValueError("selection domain must equal the admissible family")
        if any(len(col) != self.base.n for col in sel.values()):
            raise ValueError("selection column has wrong length")
        object.__setattr__(self, "selection", sel)

    @classmethod
    def build(cls, base: Semilattice, fn: SelectionFn | str,
              admissible: Sequence[int] | None = None) -> "GeneralFrame":
        """Frame from an intensional selection; full when ``admissible`` is None."""
        if isinstance(fn, str):
            fn = named_selection(fn)
        adm = tuple(base.filters if admissible is None else admissible)
        sel = {a: tuple(fn(base, x, a) for x in range(base.n)) for a in adm}
        return cls(base, adm, sel)

    @property
    def n(self) -> int:
        return self.base.n

    @cached_property
    def admissible_set(self) -> frozenset[int]:
        return frozenset(self.admissible)

    @cached_property
    def is_full(self) -> bool:
        return self.admissible_set == frozenset(self.base.filters)

    @cached_property
    def _cto_cache(self) -> dict[tuple[int, int], int]:
        return {}

    def s(self, x: int, a: int) -> int:
        try:
            return self.selection[a][x]
        except KeyError:
            raise ValueError(f"{self.base.show(a)} is not admissible") from None

    def cto(self, a: int, b: int) -> int:
        """``a ⊸̇ b = {x : s(x, a) ⊆ b}``."""
        key = (a, b)
        r = self._cto_cache.get(key)
        if r is None:
            try:
                col = self.selection[a]
            except KeyError:
                raise ValueError(f"{self.base.show(a)} is not admissible") from None
            r = 0
            nb = ~b
            for x, v in enumerate(col):
                if not v & nb:
                    r |= 1 << x
            self._cto_cache[key] = r
        return r

    def table_entries(self) -> Iterator[tuple[int, int, int]]:
        for a in self.admissible:
            for x, v in enumerate(self.selection[a]):
                yield x, a, v

    def __repr__(self) -> str:
        return (f"GeneralFrame(n={self.n}, admissible={len(self.admissible)}"
                f"/{len(self.base.filters)})")


class UnknownAtom(KeyError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Model:
    frame: GeneralFrame
    valuation: Mapping[str, int]


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate_frame(g: GeneralFrame) -> list[Violation]:
    from .semilattice import validate_semilattice

    s = g.base
    out = list(validate_semilattice(s))
    if out:
        return out
    show = s.show
    names = s.names
    adm = g.admissible_set
    for a in g.admissible:
        if not is_filter(s, a):
            out.append(Violation("admissible-not-filter", (show(a),)))
    if out:
        return out
    if s.all_mask not in adm:
        out.append(Violation("admissible-contains-X", ()))
    if s.top_mask not in adm:
        out.append(Violation("admissible-contains-top", ()))
    for a in g.admissible:
        for x, v in enumerate(g.selection[a]):
            if not is_filter(s, v):
                out.append(Violation("selection-not-filter", (names[x], show(a), show(v))))
    if out:
        return out
    for a in g.admissible:
        col = g.selection[a]
        if col[s.top] != s.top_mask:
            out.append(Violation("S1", (names[s.top], show(a))))
        for x in range(s.n):
            for y in members(s.up[x]):
                if col[y] & ~col[x]:
                    out.append(Violation("S2", (names[x], names[y], show(a))))
        for x in range(s.n):
            for y in range(x, s.n):
                xy = s.meet[x][y]
                # S3 combined with S2 is the identity s(x⋏y) = s(x) ▽ s(y)
                j = s.join(col[x], col[y])
                for z in members(col[xy] & ~j):
                    out.append(Violation("S3", (names[x], names[y], names[z], show(a))))
    for a in g.admissible:
        for b in g.admissible:
            if a & b not in adm:
                out.append(Violation("closed-intersection", (show(a), show(b))))
            if s.join(a, b) not in adm:
                out.append(Violation("closed-join", (show(a), show(b))))
            if g.cto(a, b) not in adm:
                out.append(Violation("closed-cto", (show(a), show(b))))
    return out


def check_s_genfil(g: GeneralFrame) -> bool:
    """``s(x ⋏ y, a) == s(x, a) ▽ s(y, a)`` for all worlds and admissible a."""
    s = g.base
    for a in g.admissible:
        col = g.selection[a]
        for x in range(s.n):
            for y in range(x, s.n):
                if col[s.meet[x][y]] != s.join(col[x], col[y]):
                    return False
    return True


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

# compiled node kinds
_ATOM, _TOP, _BOT, _AND, _OR, _CTO = range(6)


def compile_formula(*fs: Formula) -> tuple[list[tuple], list[int], list[str]]:
    """Post-order DAG of the distinct subformulas of ``fs``.

    Returns ``(nodes, roots, atom_names)``; atom nodes refer to positions in
    ``atom_names``.
    """
    names = atoms(*fs)
    aidx = {nm: i for i, nm in enumerate(names)}
    nodes: list[tuple] = []
    seen: dict[Formula, int] = {}

    def visit(f: Formula) -> int:
        k = seen.get(f)
        if k is not None:
            return k
        if isinstance(f, Prop):
            node = (_ATOM, aidx[f.name], 0)
        elif isinstance(f, Top):
            node = (_TOP, 0, 0)
        elif isinstance(f, Bot):
            node = (_BOT, 0, 0)
        else:
            left, right = visit(f.left), visit(f.right)
            kind = _AND if isinstance(f, And) else _OR if isinstance(f, Or) else _CTO
            node = (kind, left, right)
        nodes.append(node)
        seen[f] = len(nodes) - 1
        return len(nodes) - 1

    roots = [visit(f) for f in fs]
    return nodes, roots, names


def run_compiled(g: GeneralFrame, nodes: list[tuple], vals: Sequence[int]) -> list[int]:
    s = g.base
    out: list[int] = []
    for kind, a, b in nodes:
        if kind == _ATOM:
            out.append(vals[a])
        elif kind == _AND:
            out.append(out[a] & out[b])
        elif kind == _OR:
            out.append(s.join(out[a], out[b]))
        elif kind == _CTO:
            out.append(g.cto(out[a], out[b]))
        elif kind == _TOP:
            out.append(s.all_mask)
        else:
            out.append(s.top_mask)
    return out


def eval_formula(m: Model, f: Formula) -> int:
    """The truth set of ``f`` in ``m`` as a bitmask over worlds."""
    g = m.frame
    s = g.base

    def ev(h: Formula) -> int:
        if isinstance(h, Prop):
            try:
                return m.valuation[h.name]
            except KeyError:
                raise UnknownAtom(h.name) from None
        if isinstance(h, Top):
            return s.all_mask
        if isinstance(h, Bot):
            # x ⊩ ⊥ iff x = 1
            return s.top_mask
        left, right = ev(h.left), ev(h.right)
        if isinstance(h, And):
            return left & right
        if isinstance(h, Or):
            # some y ⊩ φ, z ⊩ ψ with y ⋏ z ≼ x
            return s.join(left, right)
        return g.cto(left, right)

    return ev(f)


def _valuations(g: GeneralFrame, names: list[str], budget: int) -> Iterator[tuple[int, ...]]:
    count = len(g.admissible) ** len(names)
    if count > budget:
        raise BudgetExceeded(
            f"{count} valuations exceed the budget of {budget}")
    return product(g.admissible, repeat=len(names))


def find_refutation(g: GeneralFrame, cp: ConsequencePair,
                    budget: int = DEFAULT_BUDGET) -> tuple[dict[str, int], int] | None:
    """First admissible valuation and world in ``⟦lhs⟧ \\ ⟦rhs⟧``, if any.

    Valuations range over the atoms of ``cp`` in lexicographic order of the
    admissible family; the world is the least index in the difference.
    """
    nodes, (lr, rr), names = compile_formula(cp.lhs, cp.rhs)
    for vals in _valuations(g, names, budget):
        res = run_compiled(g, nodes, vals)
        diff = res[lr] & ~res[rr]
        if diff:
            world = (diff & -diff).bit_length() - 1
            return dict(zip(names, vals)), world
    return None


def validates(g: GeneralFrame, cp: ConsequencePair, budget: int = DEFAULT_BUDGET) -> bool:
    return find_refutation(g, cp, budget) is None


# ---------------------------------------------------------------------------
# Complex algebra
# ---------------------------------------------------------------------------

def complex_algebra(g: GeneralFrame):
    """The conditional lattice ``(A, X, {1}, ∩, ▽, ⊸̇)`` on the admissible family."""
    from .algebra import ConditionalLattice

    s = g.base
    adm = g.admissible
    pos = {a: i for i, a in enumerate(adm)}

    def lookup(m: int) -> int:
        try:
            return pos[m]
        except KeyError:
            raise ValueError(
                f"admissible family not closed: {s.show(m)} is missing") from None

    meet = tuple(tuple(lookup(a & b) for b in adm) for a in adm)
    join = tuple(tuple(lookup(s.join(a, b)) for b in adm) for a in adm)
    cto = tuple(tuple(lookup(g.cto(a, b)) for b in adm) for a in adm)
    return ConditionalLattice(
        names=tuple(s.show(a) for a in adm),
        top=pos[s.all_mask], bot=pos[s.top_mask],
        meet=meet, join=join, cto=cto,
    )


# ---------------------------------------------------------------------------
# Selection morphisms
# ---------------------------------------------------------------------------

def _preimage(f: Sequence[int], mask2: int) -> int:
    out = 0
    for x, fx in enumerate(f):
        if (mask2 >> fx) & 1:
            out |= 1 << x
    return out


def check_selection_morphism(f: Sequence[int], g: GeneralFrame,
                             g2: GeneralFrame) -> list[Violation]:
    """Every failed L-morphism or (M0)-(M2) condition for ``f : g -> g2``."""
    s, s2 = g.base, g2.base
    nm, nm2 = s.names, s2.names
    out: list[Violation] = []
    if len(f) != s.n or any(not 0 <= v < s2.n for v in f):
        return [Violation("not-a-map", (tuple(f),))]
    for x in range(s.n):
        for y in range(s.n):
            if f[s.meet[x][y]] != s2.meet[f[x]][f[y]]:
                out.append(Violation("meet-preservation", (nm[x], nm[y])))
    for x in range(s.n):
        if (f[x] == s2.top) != (x == s.top):
            out.append(Violation("top-iff", (nm[x], nm2[f[x]])))
    for x in range(s.n):
        # reach[y2]: worlds z2 with some y ⋏ z ≼ x, y2 ≼ f(y), z2 ≼ f(z)
        reach = [0] * s2.n
        for y in range(s.n):
            for z in range(s.n):
                if s.leq(s.meet[y][z], x):
                    for y2 in members(s2.down[f[y]]):
                        reach[y2] |= s2.down[f[z]]
        for y2 in range(s2.n):
            for z2 in range(s2.n):
                if s2.leq(s2.meet[y2][z2], f[x]) and not (reach[y2] >> z2) & 1:
                    out.append(Violation("zig-zag", (nm[x], nm2[y2], nm2[z2])))
    adm = g.admissible_set
    for a2 in g2.admissible:
        pre = _preimage(f, a2)
        if pre not in adm:
            out.append(Violation("M0", (s2.show(a2),)))
            continue
        col, col2 = g.selection[pre], g2.selection[a2]
        for x in range(s.n):
            sx = col[x]
            s2fx = col2[f[x]]
            for y in members(sx):
                if not (s2fx >> f[y]) & 1:
                    out.append(Violation("M1", (nm[x], s2.show(a2), nm[y])))
            for y2 in members(s2fx):
                if not any(s2.leq(f[y], y2) for y in members(sx)):
                    out.append(Violation("M2", (nm[x], s2.show(a2), nm2[y2])))
    return out


def truth_preservation_counterexample(
        f: Sequence[int], m: Model, m2: Model, depth: int = 3
) -> tuple[Formula, int] | None:
    """A formula of depth ≤ ``depth`` and a world where truth is not preserved.

    Formulas range over the atoms valued by both models.  Formulas with the
    same pair of truth sets are interchangeable, so the search runs over
    the closure of truth-set pairs, keeping the first formula found for each.
    """
    g, g2 = m.frame, m2.frame
    s, s2 = g.base, g2.base
    names = sorted(set(m.valuation) & set(m2.valuation))
    level: dict[tuple[int, int], Formula] = {}
    for nm in names:
        level.setdefault((m.valuation[nm], m2.valuation[nm]), Prop(nm))
    level.setdefault((s.all_mask, s2.all_mask), TOP)
    level.setdefault((s.top_mask, s2.top_mask), BOT)

    def bad(pair: tuple[int, int]) -> int:
        return pair[0] ^ _preimage(f, pair[1])

    for d in range(depth + 1):
        for pair, phi in level.items():
            diff = bad(pair)
            if diff:
                return phi, (diff & -diff).bit_length() - 1
        if d == depth:
            break
        nxt = dict(level)
        items = list(level.items())
        for (p1, phi), (p2, psi) in product(items, repeat=2):
            a, a2 = p1
            b, b2 = p2
            cand = [((a & b, a2 & b2), And(phi, psi)),
                    ((s.join(a, b), s2.join(a2, b2)), Or(phi, psi))]
            if a in g.admissible_set and a2 in g2.admissible_set:
                cand.append(((g.cto(a, b), g2.cto(a2, b2)), Cto(phi, psi)))
            for key, chi in cand:
                nxt.setdefault(key, chi)
        level = nxt
    return None


def truth_preservation_test(f: Sequence[int], m: Model, m2: Model, depth: int = 3) -> bool:
    return truth_preservation_counterexample(f, m, m2, depth) is None
