"""Axioms, their frame correspondents, fill-ins and intuitionistic evaluation."""

from __future__ import annotations

import enum
from itertools import product
from typing import Iterator, Mapping

from .frame import GeneralFrame, find_refutation, validate_frame, validates
from .semilattice import (
    Semilattice, distributivity_witness, hms_check, members,
)
from .syntax import (
    And, Bot, ConsequencePair, Cto, Formula, Or, Prop, Top, parse_pair,
)

__all__ = [
    "Axiom", "FillIn", "NoCorrespondence", "NotDistributive",
    "axiom_pair", "corr_check", "correspondence_equivalence", "fill_in",
    "persistence_test", "find_persistence_failure",
    "canonical_int_selection", "int_frame", "int_eval", "joint_int_condition",
    "PRIMED",
]


class Axiom(enum.Enum):
    REFL = "refl"
    COND = "cond"
    VEQ = "veq"
    CS = "cs"
    DET = "det"
    EXPL = "expl"
    PNP = "pnp"
    MP = "mp"
    TR = "tr"
    CM = "cm"
    DIST = "dist"

    @property
    def pair(self) -> ConsequencePair:
        return parse_pair(_AXIOM_TEXT[self])


_AXIOM_TEXT = {
    Axiom.REFL: "T |- p ~> p",
    Axiom.COND: "p |- T ~> p",
    Axiom.VEQ: "p |- q ~> p",
    Axiom.CS: "p /\\ q |- p ~> q",
    Axiom.DET: "(T ~> p) |- p",
    Axiom.EXPL: "T |- F ~> p",
    Axiom.PNP: "p /\\ (p ~> F) |- F",
    Axiom.MP: "p /\\ (p ~> q) |- q",
    Axiom.TR: "(p ~> q) /\\ (q ~> r) |- p ~> r",
    Axiom.CM: "(p ~> q) /\\ (p ~> r) |- (p /\\ q) ~> r",
    Axiom.DIST: "p /\\ (q \\/ r) |- (p /\\ q) \\/ (p /\\ r)",
}


def axiom_pair(ax: Axiom | ConsequencePair) -> ConsequencePair:
    return ax if isinstance(ax, ConsequencePair) else ax.pair


class FillIn(enum.Enum):
    KAPPA_TOP = "k1"
    KAPPA_PRINCIPAL = "kup"
    KAPPA_IDENTITY = "kr"


class NoCorrespondence(ValueError):
    pass


class NotDistributive(ValueError):
    def __init__(self, witness: tuple[int, int, int], names: tuple[str, ...]):
        x, y, z = witness
        super().__init__(
            f"semilattice is not distributive: {names[x]} ⋏ {names[y]} ≼ {names[z]} "
            f"but {names[z]} is not a meet of elements above them")
        self.witness = witness


# axioms that have a primed (full/descriptive) correspondent
PRIMED = frozenset({Axiom.VEQ, Axiom.CS, Axiom.DET, Axiom.MP})


def _every(g: GeneralFrame):
    s = g.base
    return s, g.admissible, range(s.n)


def _refl(g):
    _, adm, worlds = _every(g)
    return all(g.s(x, a) & ~a == 0 for x in worlds for a in adm)


def _cond(g):
    s, adm, worlds = _every(g)
    return all(g.s(x, s.all_mask) & ~a == 0
               for x in worlds for a in adm if (a >> x) & 1)


def _veq(g):
    _, adm, worlds = _every(g)
    return all(g.s(x, b) & ~a == 0
               for x in worlds for a in adm if (a >> x) & 1 for b in adm)


def _veq_primed(g):
    s, adm, worlds = _every(g)
    return all(g.s(x, a) & ~s.up[x] == 0 for x in worlds for a in adm)


def _cs(g):
    _, adm, worlds = _every(g)
    return all(g.s(x, a) & ~b == 0
               for x in worlds for a in adm for b in adm if ((a & b) >> x) & 1)


def _cs_primed(g):
    s, adm, worlds = _every(g)
    return all(g.s(x, a) & ~s.up[x] == 0 for x in worlds for a in adm if (a >> x) & 1)


def _det(g):
    s, adm, worlds = _every(g)
    return all((a >> x) & 1
               for x in worlds for a in adm if g.s(x, s.all_mask) & ~a == 0)


def _det_primed(g):
    s, _, worlds = _every(g)
    return all((g.s(x, s.all_mask) >> x) & 1 for x in worlds)


def _expl(g):
    s, _, worlds = _every(g)
    return all(g.s(x, s.top_mask) == s.top_mask for x in worlds)


def _pnp(g):
    s, adm, worlds = _every(g)
    return all(x == s.top
               for x in worlds for a in adm
               if (a >> x) & 1 and g.s(x, a) == s.top_mask)


def _mp(g):
    _, adm, worlds = _every(g)
    return all((b >> x) & 1
               for x in worlds for a in adm if (a >> x) & 1
               for b in adm if g.s(x, a) & ~b == 0)


def _mp_primed(g):
    _, adm, worlds = _every(g)
    return all((g.s(x, a) >> x) & 1 for x in worlds for a in adm if (a >> x) & 1)


_PLAIN = {
    Axiom.REFL: _refl, Axiom.COND: _cond, Axiom.VEQ: _veq, Axiom.CS: _cs,
    Axiom.DET: _det, Axiom.EXPL: _expl, Axiom.PNP: _pnp, Axiom.MP: _mp,
}
_PRIMED_CHECKS = {
    Axiom.VEQ: _veq_primed, Axiom.CS: _cs_primed,
    Axiom.DET: _det_primed, Axiom.MP: _mp_primed,
}


def _full_or_descriptive(g: GeneralFrame) -> bool:
    return g.is_full or hms_check(g.base, g.admissible)


def corr_check(g: GeneralFrame, ax: Axiom, primed: bool = False) -> bool:
    """Evaluate the frame condition corresponding to ``ax`` on ``g``."""
    if ax not in _PLAIN:
        raise NoCorrespondence(f"no frame correspondent is known for {ax.value}")
    if not primed:
        return _PLAIN[ax](g)
    if ax not in _PRIMED_CHECKS:
        raise NoCorrespondence(f"{ax.value} has no primed correspondent")
    if not _full_or_descriptive(g):
        raise ValueError("primed correspondents need a full or descriptive frame")
    return _PRIMED_CHECKS[ax](g)


def correspondence_equivalence(g: GeneralFrame, ax: Axiom, primed: bool = False) -> bool:
    return validates(g, ax.pair) == corr_check(g, ax, primed)


def joint_int_condition(g: GeneralFrame) -> bool:
    """``s(x, a) = a ∩ ↑x`` for all worlds and admissible filters."""
    s = g.base
    return all(g.s(x, a) == a & s.up[x] for a in g.admissible for x in range(s.n))


# ---------------------------------------------------------------------------
# Fill-ins
# ---------------------------------------------------------------------------

def _fill_value(s: Semilattice, k: FillIn, x: int, a: int) -> int:
    if k is FillIn.KAPPA_TOP:
        return s.top_mask
    if k is FillIn.KAPPA_PRINCIPAL:
        return s.up[x]
    # s(1, a) = {1} keeps the result a selection function
    return s.top_mask if x == s.top else a


def fill_in(g: GeneralFrame, k: FillIn) -> GeneralFrame:
    """Extend the selection of ``g`` to every filter, yielding a full frame."""
    s = g.base
    sel = {}
    for a in s.filters:
        if a in g.admissible_set:
            sel[a] = g.selection[a]
        else:
            sel[a] = tuple(_fill_value(s, k, x, a) for x in range(s.n))
    return GeneralFrame(s, s.filters, sel)


def persistence_test(g: GeneralFrame, ax: Axiom | ConsequencePair, k: FillIn) -> bool:
    cp = axiom_pair(ax)
    return not validates(g, cp) or validates(fill_in(g, k), cp)


def find_persistence_failure(ax: Axiom | ConsequencePair, k: FillIn, max_n: int = 4,
                             max_tables: int = 2000, seed: int = 0,
                             require_descriptive: bool = True,
                             ) -> tuple[GeneralFrame, dict[str, int], int] | None:
    """First frame with a proper admissible family where ``k`` breaks ``ax``.

    Frames are generated in a fixed order (see
    :func:`selframe.search.generate_general_frames`).  With
    ``require_descriptive`` only frames separating points are considered.
    Returns the frame, a valuation refuting the axiom on the filled-in frame
    and the refuting world.
    """
    from .search import generate_general_frames

    cp = axiom_pair(ax)
    for g in generate_general_frames(max_n, proper=True, max_tables=max_tables, seed=seed):
        if require_descriptive and not hms_check(g.base, g.admissible):
            continue
        if not validates(g, cp):
            continue
        filled = fill_in(g, k)
        hit = find_refutation(filled, cp)
        if hit is not None:
            return filled, hit[0], hit[1]
    return None


# ---------------------------------------------------------------------------
# Intuitionistic reading on distributive semilattices
# ---------------------------------------------------------------------------

def canonical_int_selection(s: Semilattice) -> dict[int, tuple[int, ...]]:
    """The full selection table ``s(x, a) = a ∩ ↑x``."""
    w = distributivity_witness(s)
    if w is not None:
        raise NotDistributive(w, s.names)
    return {a: tuple(a & s.up[x] for x in range(s.n)) for a in s.filters}


def int_frame(s: Semilattice) -> GeneralFrame:
    return GeneralFrame(s, s.filters, canonical_int_selection(s))


def int_eval(s: Semilattice, valuation: Mapping[str, int], f: Formula) -> int:
    """Truth set with ``~>`` read as ``∀y ≽ x (y ⊩ φ ⇒ y ⊩ ψ)``."""
    w = distributivity_witness(s)
    if w is not None:
        raise NotDistributive(w, s.names)

    def ev(h: Formula) -> int:
        if isinstance(h, Prop):
            return valuation[h.name]
        if isinstance(h, Top):
            return s.all_mask
        if isinstance(h, Bot):
            return s.top_mask
        a, b = ev(h.left), ev(h.right)
        if isinstance(h, And):
            return a & b
        if isinstance(h, Or):
            meets = 0
            for y in members(a):
                for z in members(b):
                    meets |= 1 << s.meet[y][z]
            return s.upclose(meets)
        out = 0
        for x in range(s.n):
            if all((b >> y) & 1 for y in members(s.up[x]) if (a >> y) & 1):
                out |= 1 << x
        return out

    return ev(f)
