"""Generation of frames, bounded derivation in CL(Γ) and countermodel search."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Iterable, Iterator, Sequence

from .frame import GeneralFrame, find_refutation, named_selection, validate_frame, validates
from .semilattice import Semilattice, is_distributive, members
from .syntax import (
    BOT, TOP, And, Bot, ConsequencePair, Cto, Formula, Or, Prop, TheoryGamma, Top,
    big_and, conjuncts, parse_pair, print_pair, subformulas, substitute,
)

__all__ = [
    "enumerate_semilattices", "canonical_form", "valid_columns",
    "generate_selections", "generate_general_frames", "corpus_frames",
    "ProofTree", "AXIOM_SCHEMAS", "derive", "check_proof", "Prover",
    "Budget", "Countermodel", "Derivable", "Refuted", "Unknown", "Verdict",
    "find_countermodel", "decide",
]


# ---------------------------------------------------------------------------
# Semilattices
# ---------------------------------------------------------------------------

def _element_names(n: int) -> tuple[str, ...]:
    # top-down labeling puts the bottom last
    letters = "abcdefghijklmnopqrstuvwxyz"
    if n == 1:
        return ("1",)
    mid = tuple(letters[i] if i < 26 else f"e{i}" for i in range(n - 2))
    return ("1",) + mid + ("0",)


def _top_down_orders(s: Semilattice) -> Iterator[list[int]]:
    """Orderings of the elements in which every element follows those above it."""
    n = s.n
    above = [[y for y in members(s.up[x]) if y != x] for x in range(n)]
    placed = [False] * n
    seq: list[int] = []

    def go() -> Iterator[list[int]]:
        if len(seq) == n:
            yield list(seq)
            return
        for x in range(n):
            if not placed[x] and all(placed[y] for y in above[x]):
                placed[x] = True
                seq.append(x)
                yield from go()
                seq.pop()
                placed[x] = False

    return go()


def _relabel(s: Semilattice, order: Sequence[int], names: Sequence[str]) -> Semilattice:
    pos = {old: new for new, old in enumerate(order)}
    meet = tuple(tuple(pos[s.meet[order[i]][order[j]]] for j in range(s.n))
                 for i in range(s.n))
    return Semilattice(tuple(names), pos[s.top], meet)


def canonical_form(s: Semilattice) -> Semilattice:
    """Isomorphism-invariant relabeling: the least meet table over top-down orders."""
    best = None
    for order in _top_down_orders(s):
        pos = {old: new for new, old in enumerate(order)}
        key = tuple(pos[s.meet[order[i]][order[j]]] for i in range(s.n) for j in range(s.n))
        if best is None or key < best[0]:
            best = (key, order)
    return _relabel(s, best[1], _element_names(s.n))


def _height(s: Semilattice) -> int:
    memo: dict[int, int] = {}

    def h(x: int) -> int:
        if x not in memo:
            above = [y for y in members(s.up[x]) if y != x]
            memo[x] = 1 + max((h(y) for y in above), default=0)
        return memo[x]

    return max(h(x) for x in range(s.n))


def _natural_semilattices(n: int) -> Iterator[Semilattice]:
    """Meet-semilattices on ``0..n-1`` where ``x ≺ y`` implies ``y < x``; 0 is top."""
    ups: list[int] = [1]  # strict-or-equal upset masks, element 0 is top

    def upsets_of(k: int) -> Iterator[int]:
        # proper upsets of the poset on 0..k-1 containing 0
        for bits in range(1 << k):
            if not bits & 1:
                continue
            if all(ups[y] & ~bits == 0 for y in range(k) if (bits >> y) & 1):
                yield bits

    def go(k: int) -> Iterator[Semilattice]:
        if k == n:
            le = [[bool((ups[x] >> y) & 1) for y in range(n)] for x in range(n)]
            meet = []
            for x in range(n):
                row = []
                for y in range(n):
                    lower = [z for z in range(n) if le[z][x] and le[z][y]]
                    glb = [z for z in lower if all(le[w][z] for w in lower)]
                    if len(glb) != 1:
                        return
                    row.append(glb[0])
                meet.append(tuple(row))
            yield Semilattice(tuple(str(i) for i in range(n)), 0, tuple(meet))
            return
        for u in upsets_of(k):
            ups.append(u | (1 << k))
            yield from go(k + 1)
            ups.pop()

    if n == 1:
        yield Semilattice(("0",), 0, ((0,),))
        return
    yield from go(1)


def enumerate_semilattices(n: int, up_to_iso: bool = True) -> list[Semilattice]:
    """All meet-semilattices with top on ``n`` elements.

    With ``up_to_iso`` one canonical representative per class, ordered by
    height (flattest first) and then by meet table; otherwise every labeled
    meet table on the element names ``0..n-1``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    reps: dict[tuple, Semilattice] = {}
    for s in _natural_semilattices(n):
        c = canonical_form(s)
        reps.setdefault(c.meet, c)
    ordered = sorted(reps.values(), key=lambda s: (_height(s), s.meet))
    if up_to_iso:
        return ordered
    labeled: dict[tuple, Semilattice] = {}
    names = tuple(str(i) for i in range(n))
    for rep in ordered:
        for perm in permutations(range(n)):
            t = _relabel(rep, perm, names)
            labeled.setdefault((t.top, t.meet), t)
    return sorted(labeled.values(), key=lambda s: (s.top, s.meet))


# ---------------------------------------------------------------------------
# Selection tables
# ---------------------------------------------------------------------------

def valid_columns(s: Semilattice, limit: int = 10 ** 6) -> list[tuple[int, ...]]:
    """Every map ``x ↦ s(x, a)`` satisfying S1-S3 for a fixed filter ``a``.

    The conditions do not mention ``a``, so one list serves every column.
    """
    n = s.n
    order = sorted(range(n), key=lambda x: bin(s.up[x]).count("1"))
    fils = s.filters
    col = [-1] * n
    out: list[tuple[int, ...]] = []
    pairs_below: dict[int, list[tuple[int, int]]] = {x: [] for x in range(n)}
    for y in range(n):
        for z in range(y + 1, n):
            m = s.meet[y][z]
            if m not in (y, z):
                pairs_below[m].append((y, z))

    def go(k: int) -> None:
        if len(out) >= limit:
            raise OverflowError("too many selection columns")
        if k == n:
            out.append(tuple(col))
            return
        x = order[k]
        if x == s.top:
            choices: Iterable[int] = (s.top_mask,)
        else:
            need = 0
            for y in members(s.up[x]):
                if y != x:
                    need |= col[y]
            choices = [v for v in fils if need & ~v == 0]
        for v in choices:
            if all(v & ~s.join(col[y], col[z]) == 0 for y, z in pairs_below[x]):
                col[x] = v
                go(k + 1)
        col[x] = -1

    go(0)
    return out


def _repair_sample(s: Semilattice, rng: random.Random, tries: int = 1000) -> tuple[int, ...]:
    fils = s.filters
    for _ in range(tries):
        raw = [s.top_mask if x == s.top else rng.choice(fils) for x in range(s.n)]
        # force S2 by joining along the order
        col = []
        for x in range(s.n):
            v = s.top_mask
            for y in members(s.up[x]):
                v = s.join(v, raw[y])
            col.append(v)
        if all(col[s.meet[x][y]] == s.join(col[x], col[y])
               for x in range(s.n) for y in range(s.n)):
            return tuple(col)
    raise RuntimeError("rejection sampling failed")


def generate_selections(s: Semilattice, admissible: Sequence[int] | None = None,
                        strategy: str = "exhaustive", seed: int = 0, k: int = 100,
                        budget: int = 10 ** 6) -> Iterator[dict[int, tuple[int, ...]]]:
    """Selection tables on ``admissible`` (default: all filters).

    ``exhaustive`` emits every S1-S3 table, refusing when there are more than
    ``budget``; ``sampled`` emits ``k`` tables from a seeded generator;
    ``named`` emits the intensional families (principal-int only on
    distributive semilattices).
    """
    adm = tuple(s.filters if admissible is None else admissible)
    if strategy == "named":
        for kind in ("constant-top", "identity", "principal-int", "principal-up"):
            if kind == "principal-int" and not is_distributive(s):
                continue
            fn = named_selection(kind)
            yield {a: tuple(fn(s, x, a) for x in range(s.n)) for a in adm}
        return
    if strategy == "exhaustive":
        cols = valid_columns(s)
        total = len(cols) ** len(adm)
        if total > budget:
            raise OverflowError(f"{total} selection tables exceed the budget of {budget}")
        for choice in product(cols, repeat=len(adm)):
            yield dict(zip(adm, choice))
        return
    if strategy == "sampled":
        rng = random.Random(seed)
        try:
            cols = valid_columns(s, limit=budget)
        except OverflowError:
            cols = None
        for _ in range(k):
            if cols is not None:
                yield {a: rng.choice(cols) for a in adm}
            else:
                yield {a: _repair_sample(s, rng) for a in adm}
        return
    raise ValueError(f"unknown strategy {strategy!r}")


def count_selections(s: Semilattice, n_admissible: int | None = None) -> int:
    m = len(s.filters) if n_admissible is None else n_admissible
    return len(valid_columns(s)) ** m


def admissible_families(s: Semilattice, proper: bool = False) -> list[tuple[int, ...]]:
    """Families of filters containing X and {1}, closed under ∩ and ▽."""
    fils = s.filters
    fixed = {s.all_mask, s.top_mask}
    rest = [f for f in fils if f not in fixed]
    out = []
    for r in range(len(rest) + 1):
        for extra in combinations(rest, r):
            fam = fixed | set(extra)
            if all(a & b in fam and s.join(a, b) in fam for a in fam for b in fam):
                if proper and len(fam) == len(fils):
                    continue
                out.append(tuple(sorted(fam, key=lambda m: (bin(m).count("1"), members(m)))))
    return out


def generate_general_frames(max_n: int = 4, proper: bool = False, max_tables: int = 2000,
                            seed: int = 0, min_n: int = 1) -> Iterator[GeneralFrame]:
    """Well-formed general frames in a deterministic order.

    For each semilattice (up to isomorphism) and admissible family, selection
    tables are enumerated when there are at most ``max_tables`` of them and
    sampled (``max_tables`` draws) otherwise; tables whose ``⊸̇`` leaves the
    family are skipped.
    """
    for n in range(min_n, max_n + 1):
        for s in enumerate_semilattices(n):
            for fam in admissible_families(s, proper=proper):
                total = len(valid_columns(s)) ** len(fam)
                strategy = "exhaustive" if total <= max_tables else "sampled"
                for sel in generate_selections(s, fam, strategy, seed=seed, k=max_tables,
                                               budget=max_tables):
                    g = GeneralFrame(s, fam, sel)
                    if proper and not _closed_under_cto(g):
                        continue
                    yield g


def _closed_under_cto(g: GeneralFrame) -> bool:
    adm = g.admissible_set
    return all(g.cto(a, b) in adm for a in g.admissible for b in g.admissible)


def corpus_frames(max_n: int = 4, sampled: int = 500, seed: int = 0) -> Iterator[GeneralFrame]:
    """Full frames: every named family plus ``sampled`` seeded tables per semilattice."""
    for n in range(1, max_n + 1):
        for s in enumerate_semilattices(n):
            for sel in generate_selections(s, strategy="named"):
                yield GeneralFrame(s, s.filters, sel)
            for sel in generate_selections(s, strategy="sampled", seed=seed, k=sampled):
                yield GeneralFrame(s, s.filters, sel)


# ---------------------------------------------------------------------------
# Proofs
# ---------------------------------------------------------------------------

AXIOM_SCHEMAS: dict[str, ConsequencePair] = {
    name: parse_pair(text) for name, text in {
        "top": "p |- T",
        "bottom": "F |- p",
        "reflexivity": "p |- p",
        "and-elim-left": "p /\\ q |- p",
        "and-elim-right": "p /\\ q |- q",
        "or-intro-left": "p |- p \\/ q",
        "or-intro-right": "q |- p \\/ q",
        "modal-top": "T |- p ~> T",
        "monotonicity": "p ~> (q /\\ r) |- (p ~> q) /\\ (p ~> r)",
        "normality": "(p ~> q) /\\ (p ~> r) |- p ~> (q /\\ r)",
    }.items()
}

RULES = ("transitivity", "and-intro", "or-elim", "cong-left", "cong-right")


@dataclass(frozen=True)
class ProofTree:
    """A derivation of ``conclusion``.

    Leaves use an axiom schema name (or ``"gamma"`` with ``gamma_index``)
    together with the substitution instantiating it; internal nodes name one
    of :data:`RULES`.
    """

    conclusion: ConsequencePair
    rule: str
    premises: tuple["ProofTree", ...] = ()
    substitution: tuple[tuple[str, Formula], ...] = ()
    gamma_index: int | None = None

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)

    def to_json(self) -> dict:
        d: dict = {"conclusion": print_pair(self.conclusion), "rule": self.rule}
        if self.substitution:
            d["substitution"] = {k: str(v) for k, v in self.substitution}
        if self.gamma_index is not None:
            d["gamma_index"] = self.gamma_index
        if self.premises:
            d["premises"] = [p.to_json() for p in self.premises]
        return d


def _leaf(rule: str, lhs: Formula, rhs: Formula, **subst: Formula) -> ProofTree:
    return ProofTree(ConsequencePair(lhs, rhs), rule, (), tuple(sorted(subst.items())))


def check_proof(t: ProofTree, gamma: Iterable[ConsequencePair] = ()) -> bool:
    """Independent local check of every node of ``t``."""
    gamma = tuple(gamma)
    stack = [t]
    while stack:
        node = stack.pop()
        if not _check_node(node, gamma):
            return False
        stack.extend(node.premises)
    return True


def _check_node(node: ProofTree, gamma: tuple[ConsequencePair, ...]) -> bool:
    c = node.conclusion
    ps = node.premises
    sub = dict(node.substitution)
    if node.rule == "gamma":
        if ps or node.gamma_index is None or not 0 <= node.gamma_index < len(gamma):
            return False
        g = gamma[node.gamma_index]
        return (substitute(g.lhs, sub), substitute(g.rhs, sub)) == (c.lhs, c.rhs)
    if node.rule in AXIOM_SCHEMAS:
        if ps:
            return False
        ax = AXIOM_SCHEMAS[node.rule]
        return (substitute(ax.lhs, sub), substitute(ax.rhs, sub)) == (c.lhs, c.rhs)
    if len(ps) != 2:
        return False
    a, b = ps[0].conclusion, ps[1].conclusion
    if node.rule == "transitivity":
        return a.rhs == b.lhs and c == ConsequencePair(a.lhs, b.rhs)
    if node.rule == "and-intro":
        return a.lhs == b.lhs and c == ConsequencePair(a.lhs, And(a.rhs, b.rhs))
    if node.rule == "or-elim":
        return a.rhs == b.rhs and c == ConsequencePair(Or(a.lhs, b.lhs), a.rhs)
    if node.rule in ("cong-left", "cong-right"):
        if not (a.lhs == b.rhs and a.rhs == b.lhs):
            return False
        if not (isinstance(c.lhs, Cto) and isinstance(c.rhs, Cto)):
            return False
        if node.rule == "cong-left":
            return (c.lhs.left, c.rhs.left) == (a.lhs, a.rhs) and c.lhs.right == c.rhs.right
        return (c.lhs.right, c.rhs.right) == (a.lhs, a.rhs) and c.lhs.left == c.rhs.left
    return False


def _trans(*ps: ProofTree) -> ProofTree:
    out = ps[0]
    for p in ps[1:]:
        out = ProofTree(ConsequencePair(out.conclusion.lhs, p.conclusion.rhs),
                        "transitivity", (out, p))
    return out


def _and_intro(p1: ProofTree, p2: ProofTree) -> ProofTree:
    return ProofTree(ConsequencePair(p1.conclusion.lhs, And(p1.conclusion.rhs, p2.conclusion.rhs)),
                     "and-intro", (p1, p2))


def _refl(f: Formula) -> ProofTree:
    return _leaf("reflexivity", f, f, p=f)


def _project(f: Formula, target: Formula) -> ProofTree:
    """``f ⊴ target`` where ``target`` is one of the conjuncts of ``f``."""
    if f == target:
        return _refl(f)
    assert isinstance(f, And)
    if target in set(conjuncts(f.left)):
        return _trans(_leaf("and-elim-left", f, f.left, p=f.left, q=f.right),
                      _project(f.left, target))
    return _trans(_leaf("and-elim-right", f, f.right, p=f.left, q=f.right),
                  _project(f.right, target))


def _conj_intro(proofs: Sequence[ProofTree]) -> ProofTree:
    out = proofs[0]
    for p in proofs[1:]:
        out = _and_intro(out, p)
    return out


def _cong(rule: str, fwd: ProofTree, bwd: ProofTree, other: Formula) -> ProofTree:
    a, b = fwd.conclusion.lhs, fwd.conclusion.rhs
    if rule == "cong-left":
        concl = ConsequencePair(Cto(a, other), Cto(b, other))
    else:
        concl = ConsequencePair(Cto(other, a), Cto(other, b))
    return ProofTree(concl, rule, (fwd, bwd))


def _normality_fold(c: Formula, bs: Sequence[Formula]) -> ProofTree:
    """``(c⊸b1) ∧ ... ∧ (c⊸bm) ⊴ c ⊸ (b1 ∧ ... ∧ bm)``, both left-nested."""
    if len(bs) == 1:
        return _refl(Cto(c, bs[0]))
    lhs_prev = big_and(Cto(c, b) for b in bs[:-1])
    last = Cto(c, bs[-1])
    whole = And(lhs_prev, last)
    m_prev = big_and(bs[:-1])
    step = _and_intro(
        _trans(_leaf("and-elim-left", whole, lhs_prev, p=lhs_prev, q=last),
               _normality_fold(c, bs[:-1])),
        _leaf("and-elim-right", whole, last, p=lhs_prev, q=last),
    )
    norm = _leaf("normality", And(Cto(c, m_prev), last), Cto(c, And(m_prev, bs[-1])),
                 p=c, q=m_prev, r=bs[-1])
    return _trans(step, norm)


def _cto_monotone(c: Formula, proof: ProofTree) -> ProofTree:
    """From ``m ⊴ d`` build ``c⊸m ⊴ c⊸d`` with congruence and monotonicity."""
    m, d = proof.conclusion.lhs, proof.conclusion.rhs
    if m == d:
        return _refl(Cto(c, m))
    md = And(m, d)
    fwd = _and_intro(_refl(m), proof)
    bwd = _leaf("and-elim-left", md, m, p=m, q=d)
    return _trans(
        _cong("cong-right", fwd, bwd, c),
        _leaf("monotonicity", Cto(c, md), And(Cto(c, m), Cto(c, d)), p=c, q=m, r=d),
        _leaf("and-elim-right", And(Cto(c, m), Cto(c, d)), Cto(c, d), p=Cto(c, m), q=Cto(c, d)),
    )


def _match(pattern: Formula, f: Formula, sub: dict[str, Formula]) -> dict[str, Formula] | None:
    if isinstance(pattern, Prop):
        bound = sub.get(pattern.name)
        if bound is None:
            out = dict(sub)
            out[pattern.name] = f
            return out
        return sub if bound == f else None
    if isinstance(pattern, (Top, Bot)):
        return sub if pattern == f else None
    if type(pattern) is not type(f):
        return None
    sub2 = _match(pattern.left, f.left, sub)
    return None if sub2 is None else _match(pattern.right, f.right, sub2)


class Prover:
    """Depth-bounded goal-directed search for derivations in CL(Γ).

    Sides of goals and cut formulas are drawn from the subformulas of the
    goal and of Γ; failing does not show underivability.
    """

    def __init__(self, gamma: Iterable[ConsequencePair] = (), universe: Iterable[Formula] = ()):
        self.gamma = tuple(TheoryGamma(gamma))
        uni: set[Formula] = set()
        for g in self.gamma:
            uni |= subformulas(g.lhs) | subformulas(g.rhs)
        for f in universe:
            uni |= subformulas(f)
        self.universe = uni
        self._proved: dict[tuple[Formula, Formula], ProofTree] = {}
        self._failed: dict[tuple[Formula, Formula], int] = {}
        self._active: set[tuple[Formula, Formula]] = set()
        self.steps = 0

    def add_universe(self, *fs: Formula) -> None:
        for f in fs:
            self.universe |= subformulas(f)

    def prove(self, lhs: Formula, rhs: Formula, depth: int) -> ProofTree | None:
        key = (lhs, rhs)
        hit = self._proved.get(key)
        if hit is not None:
            return hit
        if depth < 0 or self._failed.get(key, -1) >= depth or key in self._active:
            return None
        self.steps += 1
        self._active.add(key)
        try:
            t = self._search(lhs, rhs, depth)
        finally:
            self._active.discard(key)
        if t is None:
            self._failed[key] = max(depth, self._failed.get(key, -1))
        else:
            self._proved[key] = t
        return t

    def _axiom_leaf(self, lhs: Formula, rhs: Formula) -> ProofTree | None:
        if lhs == rhs:
            return _refl(lhs)
        if isinstance(rhs, Top):
            return _leaf("top", lhs, rhs, p=lhs)
        if isinstance(lhs, Bot):
            return _leaf("bottom", lhs, rhs, p=rhs)
        if isinstance(lhs, And) and rhs == lhs.left:
            return _leaf("and-elim-left", lhs, rhs, p=lhs.left, q=lhs.right)
        if isinstance(lhs, And) and rhs == lhs.right:
            return _leaf("and-elim-right", lhs, rhs, p=lhs.left, q=lhs.right)
        if isinstance(rhs, Or) and lhs == rhs.left:
            return _leaf("or-intro-left", lhs, rhs, p=rhs.left, q=rhs.right)
        if isinstance(rhs, Or) and lhs == rhs.right:
            return _leaf("or-intro-right", lhs, rhs, p=rhs.left, q=rhs.right)
        for name in ("modal-top", "monotonicity", "normality"):
            ax = AXIOM_SCHEMAS[name]
            sub = _match(ax.lhs, lhs, {})
            if sub is not None:
                sub = _match(ax.rhs, rhs, sub)
            if sub is not None:
                return ProofTree(ConsequencePair(lhs, rhs), name, (), tuple(sorted(sub.items())))
        for i, g in enumerate(self.gamma):
            sub = _match(g.lhs, lhs, {})
            if sub is not None:
                sub = _match(g.rhs, rhs, sub)
            if sub is not None:
                return ProofTree(ConsequencePair(lhs, rhs), "gamma", (),
                                 tuple(sorted(sub.items())), i)
        return None

    def _equiv(self, a: Formula, b: Formula, depth: int):
        if a == b:
            return ()
        fwd = self.prove(a, b, depth)
        if fwd is None:
            return None
        bwd = self.prove(b, a, depth)
        if bwd is None:
            return None
        return (fwd, bwd)

    def _search(self, lhs: Formula, rhs: Formula, d: int) -> ProofTree | None:
        leaf = self._axiom_leaf(lhs, rhs)
        if leaf is not None:
            return leaf
        if d == 0:
            return None
        # invertible rules
        if isinstance(rhs, And):
            p1 = self.prove(lhs, rhs.left, d - 1)
            p2 = p1 and self.prove(lhs, rhs.right, d - 1)
            return _and_intro(p1, p2) if p2 else None
        if isinstance(lhs, Or):
            p1 = self.prove(lhs.left, rhs, d - 1)
            p2 = p1 and self.prove(lhs.right, rhs, d - 1)
            if not p2:
                return None
            return ProofTree(ConsequencePair(lhs, rhs), "or-elim", (p1, p2))
        # lattice choices
        if isinstance(lhs, And):
            for side, rule in ((lhs.left, "and-elim-left"), (lhs.right, "and-elim-right")):
                p = self.prove(side, rhs, d - 1)
                if p:
                    return _trans(_leaf(rule, lhs, side, p=lhs.left, q=lhs.right), p)
        if isinstance(rhs, Or):
            for side, rule in ((rhs.left, "or-intro-left"), (rhs.right, "or-intro-right")):
                p = self.prove(lhs, side, d - 1)
                if p:
                    return _trans(p, _leaf(rule, side, rhs, p=rhs.left, q=rhs.right))
        if isinstance(rhs, Cto):
            t = self._box(lhs, rhs, d)
            if t:
                return t
        if self.gamma:
            t = self._via_gamma(lhs, rhs, d)
            if t:
                return t
            t = self._cut(lhs, rhs, d)
            if t:
                return t
        return None

    def _box(self, lhs: Formula, rhs: Cto, d: int) -> ProofTree | None:
        c, dd = rhs.left, rhs.right
        chosen = []
        for k in dict.fromkeys(conjuncts(lhs)):
            if isinstance(k, Cto):
                eq = self._equiv(k.left, c, d - 1)
                if eq is not None:
                    chosen.append((k, eq))
        if not chosen:
            p = self.prove(TOP, dd, d - 1)
            if p is None:
                return None
            steps = []
            if lhs != TOP:
                steps.append(_leaf("top", lhs, TOP, p=lhs))
            steps.append(_leaf("modal-top", TOP, Cto(c, TOP), p=c))
            if dd != TOP:
                steps.append(_cong("cong-right", p, _leaf("top", dd, TOP, p=dd), c))
            return _trans(*steps)
        bs = [k.right for k, _ in chosen]
        m = big_and(bs)
        p = self.prove(m, dd, d - 1)
        if p is None:
            return None
        parts = []
        for k, eq in chosen:
            proj = _project(lhs, k)
            if eq:
                proj = _trans(proj, _cong("cong-left", eq[0], eq[1], k.right))
            parts.append(proj)
        steps = [_conj_intro(parts), _normality_fold(c, bs), _cto_monotone(c, p)]
        steps = [s for s in steps if s.conclusion.lhs != s.conclusion.rhs] or steps[:1]
        return _trans(*steps)

    def _via_gamma(self, lhs: Formula, rhs: Formula, d: int) -> ProofTree | None:
        cands = sorted(self.universe | {lhs, rhs}, key=lambda f: (len(str(f)), str(f)))
        for i, g in enumerate(self.gamma):
            subs = []
            for u in cands:
                s1 = _match(g.lhs, u, {})
                if s1 is None:
                    continue
                for v in cands:
                    s2 = _match(g.rhs, v, s1)
                    if s2 is not None and s2 not in subs:
                        subs.append(s2)
            for sub in subs:
                gl, gr = substitute(g.lhs, sub), substitute(g.rhs, sub)
                if (gl, gr) == (lhs, rhs):
                    continue
                p1 = self.prove(lhs, gl, d - 1)
                if p1 is None:
                    continue
                p2 = self.prove(gr, rhs, d - 1)
                if p2 is None:
                    continue
                leaf = ProofTree(ConsequencePair(gl, gr), "gamma", (), tuple(sorted(sub.items())), i)
                return _trans(p1, leaf, p2)
        return None

    def _cut(self, lhs: Formula, rhs: Formula, d: int) -> ProofTree | None:
        if d < 2:
            return None
        for chi in sorted(self.universe, key=lambda f: (len(str(f)), str(f))):
            if chi in (lhs, rhs):
                continue
            p1 = self.prove(lhs, chi, d - 1)
            if p1 is None:
                continue
            p2 = self.prove(chi, rhs, d - 1)
            if p2 is not None:
                return _trans(p1, p2)
        return None


def derive(cp: ConsequencePair, gamma: Iterable[ConsequencePair] = (), depth: int = 6,
           prover: Prover | None = None) -> ProofTree | None:
    """A checkable derivation of ``cp`` from ``gamma`` within ``depth``, or None."""
    pr = prover or Prover(gamma)
    pr.add_universe(cp.lhs, cp.rhs)
    return pr.prove(cp.lhs, cp.rhs, depth)


# ---------------------------------------------------------------------------
# Countermodels and the decision loop
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Budget:
    max_frame_size: int = 5
    max_depth: int = 6
    max_tables_per_frame: int = 200
    wall_ms: int = 10_000


@dataclass(frozen=True)
class Countermodel:
    frame: GeneralFrame
    valuation: dict[str, int]
    world: int


@dataclass(frozen=True)
class Derivable:
    proof: ProofTree
    kind: str = field(default="derivable", init=False)


@dataclass(frozen=True)
class Refuted:
    countermodel: Countermodel
    kind: str = field(default="refuted", init=False)


@dataclass(frozen=True)
class Unknown:
    report: dict
    kind: str = field(default="unknown", init=False)


Verdict = Derivable | Refuted | Unknown


def _frames_of_size(n: int, strategy: str, max_tables: int, seed: int) -> Iterator[GeneralFrame]:
    for s in enumerate_semilattices(n):
        seen: set[tuple] = set()
        sources = []
        if strategy in ("auto", "named"):
            sources.append(generate_selections(s, strategy="named"))
        if strategy in ("auto", "exhaustive", "sampled"):
            total = count_selections(s)
            if strategy == "exhaustive" or (strategy == "auto" and total <= max_tables):
                if total <= max_tables:
                    sources.append(generate_selections(s, strategy="exhaustive"))
                else:
                    sources.append(generate_selections(s, strategy="sampled", seed=seed,
                                                       k=max_tables))
            else:
                sources.append(generate_selections(s, strategy="sampled", seed=seed,
                                                   k=max_tables))
        for src in sources:
            for sel in src:
                key = tuple(sel[a] for a in s.filters)
                if key in seen:
                    continue
                seen.add(key)
                yield GeneralFrame(s, s.filters, sel)


def _refute_on(g: GeneralFrame, cp: ConsequencePair, gamma: Sequence[ConsequencePair]):
    if not all(validates(g, h) for h in gamma):
        return None
    hit = find_refutation(g, cp)
    if hit is None:
        return None
    return Countermodel(g, hit[0], hit[1])


def find_countermodel(cp: ConsequencePair, gamma: Iterable[ConsequencePair] = (),
                      max_n: int = 5, strategy: str = "auto", max_tables: int = 200,
                      seed: int = 0, deadline: float | None = None) -> Countermodel | None:
    """First full frame validating ``gamma`` with a world in ``⟦lhs⟧ \\ ⟦rhs⟧``.

    Frames are visited by size, then semilattice order, then selection
    source (named families first).
    """
    gamma = tuple(TheoryGamma(gamma))
    for n in range(1, max_n + 1):
        for g in _frames_of_size(n, strategy, max_tables, seed):
            if deadline is not None and time.monotonic() > deadline:
                return None
            cm = _refute_on(g, cp, gamma)
            if cm is not None:
                return cm
    return None


def decide(cp: ConsequencePair, gamma: Iterable[ConsequencePair] = (),
           budget: Budget = Budget(), seed: int = 0, strategy: str = "auto") -> Verdict:
    """Interleave bounded derivation and countermodel search.

    Round ``k`` tries derivation depth ``k`` and then frames of size ``k``.
    """
    gamma = tuple(TheoryGamma(gamma))
    start = time.monotonic()
    deadline = start + budget.wall_ms / 1000
    prover = Prover(gamma, (cp.lhs, cp.rhs))
    rounds = max(budget.max_depth, budget.max_frame_size)
    reached_depth = reached_size = 0
    for k in range(0, rounds + 1):
        if k <= budget.max_depth:
            t = prover.prove(cp.lhs, cp.rhs, k)
            reached_depth = k
            if t is not None:
                return Derivable(t)
        if 1 <= k <= budget.max_frame_size:
            for g in _frames_of_size(k, strategy, budget.max_tables_per_frame, seed):
                if time.monotonic() > deadline:
                    return Unknown(_report(budget, reached_depth, reached_size, True))
                cm = _refute_on(g, cp, gamma)
                if cm is not None:
                    return Refuted(cm)
            reached_size = k
        if time.monotonic() > deadline:
            return Unknown(_report(budget, reached_depth, reached_size, True))
    return Unknown(_report(budget, reached_depth, reached_size, False))


def _report(budget: Budget, depth: int, size: int, timed_out: bool) -> dict:
    return {
        "max_depth": budget.max_depth,
        "max_frame_size": budget.max_frame_size,
        "max_tables_per_frame": budget.max_tables_per_frame,
        "wall_ms": budget.wall_ms,
        "depth_reached": depth,
        "frame_size_reached": size,
        "timed_out": timed_out,
    }
