"""Finite duality between conditional lattices and descriptive frames.

A finite descriptive frame stands in for a selection L-space: the topology
is discrete, so clopen filters are just the admissible ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import ConditionalLattice, is_homomorphism, validate_conditional_lattice
from .frame import GeneralFrame, check_selection_morphism, complex_algebra, validate_frame
from .semilattice import Semilattice, Violation, enumerate_filters, hms_check

__all__ = [
    "FilterFrame", "NotDescriptive", "filter_frame", "theta", "theta_index",
    "theta_check", "eta", "eta_check", "dual_hom", "triangle_frame",
    "triangle_algebra", "is_descriptive", "duality_report",
]


class NotDescriptive(ValueError):
    pass


@dataclass(frozen=True)
class FilterFrame:
    """The frame of filters of a conditional lattice.

    World ``p`` is the filter ``filters[p]`` of ``source`` (a mask over the
    carrier); ``theta_masks[a]`` is the set of worlds containing ``a``.
    """

    source: ConditionalLattice
    frame: GeneralFrame
    filters: tuple[int, ...]
    theta_masks: tuple[int, ...]

    def world_of(self, fmask: int) -> int:
        try:
            return self.filters.index(fmask)
        except ValueError:
            raise ValueError("not a filter of the source lattice") from None


def filter_frame(a: ConditionalLattice) -> FilterFrame:
    report = validate_conditional_lattice(a)
    if report:
        raise ValueError(f"invalid conditional lattice: {report[0]}")
    src = a.meet_semilattice
    fils = tuple(enumerate_filters(src))
    pos = {f: i for i, f in enumerate(fils)}
    names = tuple("up(" + a.names[src.generator(f)] + ")" for f in fils)
    meet = tuple(tuple(pos[p & q] for q in fils) for p in fils)
    carrier = src.all_mask
    base = Semilattice(names, pos[carrier], meet)

    theta_masks = tuple(
        sum(1 << i for i, f in enumerate(fils) if (f >> e) & 1) for e in range(a.n)
    )
    selection = {}
    for e in range(a.n):
        col = []
        for p in fils:
            # T = {b : e ⊸ b ∈ p}; s(p, θ(e)) = worlds containing T
            t = 0
            for b in range(a.n):
                if (p >> a.cto[e][b]) & 1:
                    t |= 1 << b
            col.append(sum(1 << j for j, q in enumerate(fils) if t & ~q == 0))
        selection[theta_masks[e]] = tuple(col)
    frame = GeneralFrame(base, tuple(selection), selection)
    return FilterFrame(a, frame, fils, theta_masks)


def theta(a: ConditionalLattice) -> tuple[int, ...]:
    """``θ(a) = {p : a ∈ p}`` as world masks of :func:`filter_frame`."""
    return filter_frame(a).theta_masks


def theta_index(ff: FilterFrame) -> tuple[int, ...]:
    """θ as an element map into ``complex_algebra(ff.frame)``."""
    pos = {m: i for i, m in enumerate(ff.frame.admissible)}
    return tuple(pos[m] for m in ff.theta_masks)


def theta_check(a: ConditionalLattice, ff: FilterFrame | None = None) -> list[Violation]:
    ff = ff or filter_frame(a)
    out = []
    if len(set(ff.theta_masks)) != a.n:
        out.append(Violation("theta-injective", ()))
    if set(ff.theta_masks) != set(ff.frame.admissible):
        out.append(Violation("theta-onto-admissible", ()))
    if out:
        return out
    ca = complex_algebra(ff.frame)
    if not is_homomorphism(theta_index(ff), a, ca):
        out.append(Violation("theta-homomorphism", ()))
    return out


def is_descriptive(g: GeneralFrame) -> bool:
    return not validate_frame(g) and hms_check(g.base, g.admissible)


def eta(g: GeneralFrame) -> tuple[tuple[int, ...], FilterFrame]:
    """``η(x) = {a admissible : x ∈ a}`` into the filter frame of ``g⁺``.

    Returns the world map and the target filter frame.
    """
    if not hms_check(g.base, g.admissible):
        raise NotDescriptive("admissible family does not separate points")
    target = filter_frame(complex_algebra(g))
    pos = {f: i for i, f in enumerate(target.filters)}
    out = []
    for x in range(g.n):
        m = sum(1 << i for i, a in enumerate(g.admissible) if (a >> x) & 1)
        out.append(pos[m])
    return tuple(out), target


def eta_check(g: GeneralFrame, unit: tuple | None = None) -> list[Violation]:
    """Empty iff η is a bijective selection morphism."""
    try:
        f, target = unit or eta(g)
    except NotDescriptive as e:
        return [Violation("not-descriptive", (str(e),))]
    out = []
    if sorted(f) != list(range(target.frame.n)):
        out.append(Violation("eta-bijective", (f,)))
    out.extend(check_selection_morphism(f, g, target.frame))
    return out


def dual_hom(h: Sequence[int], a: ConditionalLattice, b: ConditionalLattice,
             ) -> tuple[tuple[int, ...], FilterFrame, FilterFrame]:
    """``p ↦ h⁻¹(p)`` from the filter frame of ``b`` to that of ``a``."""
    fa, fb = filter_frame(a), filter_frame(b)
    pos = {f: i for i, f in enumerate(fa.filters)}
    out = []
    for q in fb.filters:
        pre = sum(1 << x for x in range(a.n) if (q >> h[x]) & 1)
        if pre not in pos:
            raise ValueError("preimage is not a filter; h is not a homomorphism")
        out.append(pos[pre])
    return tuple(out), fb, fa


def triangle_frame(g: GeneralFrame, unit: tuple | None = None) -> bool:
    """``η⁻¹ ∘ θ_{g⁺}`` is the identity on the admissible family."""
    f, target = unit or eta(g)
    ca_theta = target.theta_masks  # indexed by complex-algebra elements
    for i, a in enumerate(g.admissible):
        pre = sum(1 << x for x in range(g.n) if (ca_theta[i] >> f[x]) & 1)
        if pre != a:
            return False
    return True


def triangle_algebra(a: ConditionalLattice, ff: FilterFrame | None = None,
                     unit: tuple | None = None) -> bool:
    """``θ_a⁻¹ ∘ η`` is the identity on the worlds of the filter frame of ``a``."""
    ff = ff or filter_frame(a)
    f, ff2 = unit or eta(ff.frame)
    th = theta_index(ff)
    for p, fmask in enumerate(ff.filters):
        q = ff2.filters[f[p]]
        pre = sum(1 << e for e in range(a.n) if (q >> th[e]) & 1)
        if pre != fmask:
            return False
    return True


def duality_report(a: ConditionalLattice) -> list[Violation]:
    """Every failure of θ, of η on the filter frame, and of both triangles.

    Empty iff θ is a bijective homomorphism, η is a bijective selection
    morphism and the triangle identities hold pointwise.
    """
    ff = filter_frame(a)
    out = theta_check(a, ff)
    try:
        unit = eta(ff.frame)
    except NotDescriptive as e:
        return out + [Violation("not-descriptive", (str(e),))]
    out += eta_check(ff.frame, unit)
    if not out:
        if not triangle_frame(ff.frame, unit):
            out.append(Violation("triangle-frame", ()))
        if not triangle_algebra(a, ff, unit):
            out.append(Violation("triangle-algebra", ()))
    return out
