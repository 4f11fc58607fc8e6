"""Slow, independent reference implementations used only by the tests."""

from __future__ import annotations

from itertools import permutations, product

from selframe.semilattice import Semilattice
from selframe.syntax import And, Cto, Or, Prop, TOP, BOT


def brute_filters(s: Semilattice) -> list[int]:
    """Filters straight from the definition, scanning every subset."""
    out = []
    for mask in range(1 << s.n):
        elems = [x for x in range(s.n) if (mask >> x) & 1]
        if s.top not in elems:
            continue
        up_closed = all((mask >> y) & 1 for x in elems for y in range(s.n) if s.meet[x][y] == x)
        meet_closed = all((mask >> s.meet[x][y]) & 1 for x in elems for y in elems)
        if up_closed and meet_closed:
            out.append(mask)
    return out


def brute_join(s: Semilattice, p: int, q: int) -> int:
    """Least filter containing ``p | q``, as a minimum over all filters."""
    above = [f for f in brute_filters(s) if (p | q) & ~f == 0]
    least = [f for f in above if all(f & ~g == 0 for g in above)]
    assert len(least) == 1
    return least[0]


def brute_semilattices(n: int) -> list[tuple]:
    """Every meet table on ``0..n-1`` passing the laws, then iso-deduplicated.

    Tables are generated from partial orders: a relation is kept when it is
    a partial order with a top and all pairwise glbs.
    """
    pairs = [(x, y) for x in range(n) for y in range(n) if x != y]
    tables = set()
    for bits in range(1 << len(pairs)):
        le = [[x == y for y in range(n)] for x in range(n)]
        for i, (x, y) in enumerate(pairs):
            if (bits >> i) & 1:
                le[x][y] = True
        if any(le[x][y] and le[y][x] for x, y in pairs):
            continue
        if any(le[x][y] and le[y][z] and not le[x][z]
               for x in range(n) for y in range(n) for z in range(n)):
            continue
        if not any(all(le[x][t] for x in range(n)) for t in range(n)):
            continue
        meet = []
        ok = True
        for x in range(n):
            row = []
            for y in range(n):
                lower = [z for z in range(n) if le[z][x] and le[z][y]]
                glb = [z for z in lower if all(le[w][z] for w in lower)]
                if len(glb) != 1:
                    ok = False
                    break
                row.append(glb[0])
            if not ok:
                break
            meet.append(tuple(row))
        if ok:
            tables.add(tuple(meet))
    return sorted(tables)


def iso_classes(tables: list[tuple]) -> int:
    n = len(tables[0]) if tables else 0
    seen = set()
    classes = 0
    for t in tables:
        if t in seen:
            continue
        classes += 1
        for perm in permutations(range(n)):
            inv = {p: i for i, p in enumerate(perm)}
            seen.add(tuple(tuple(inv[t[perm[i]][perm[j]]] for j in range(n)) for i in range(n)))
    return classes


def s3_by_definition(s: Semilattice, col) -> bool:
    """z ∈ s(x⋏y) implies some u ∈ s(x), v ∈ s(y) with u⋏v ≼ z."""
    for x in range(s.n):
        for y in range(s.n):
            for z in range(s.n):
                if (col[s.meet[x][y]] >> z) & 1:
                    if not any(s.leq(s.meet[u][v], z)
                               for u in range(s.n) if (col[x] >> u) & 1
                               for v in range(s.n) if (col[y] >> v) & 1):
                        return False
    return True


def brute_columns(s: Semilattice) -> list[tuple]:
    """Every S1-S3 column, scanning all maps from worlds to filters."""
    fils = brute_filters(s)
    out = []
    for col in product(fils, repeat=s.n):
        if col[s.top] != 1 << s.top:
            continue
        if any((col[y] & ~col[x]) for x in range(s.n) for y in range(s.n) if s.leq(x, y)):
            continue
        if s3_by_definition(s, col):
            out.append(col)
    return out


class ShuntingYard:
    """Operator-precedence parser, independent of the recursive-descent one."""

    PREC = {"~>": 1, "\\/": 2, "/\\": 3}
    RIGHT = {"~>"}

    def __init__(self, text: str):
        import re
        self.tokens = re.findall(r"~>|/\\|\\/|\(|\)|[a-z][a-zA-Z0-9_]*|T|F", text)

    def parse(self):
        out, ops = [], []

        def reduce():
            op = ops.pop()
            r, l = out.pop(), out.pop()
            out.append({"~>": Cto, "\\/": Or, "/\\": And}[op](l, r))

        for tok in self.tokens:
            if tok in self.PREC:
                while ops and ops[-1] in self.PREC and (
                        self.PREC[ops[-1]] > self.PREC[tok]
                        or (self.PREC[ops[-1]] == self.PREC[tok] and tok not in self.RIGHT)):
                    reduce()
                ops.append(tok)
            elif tok == "(":
                ops.append(tok)
            elif tok == ")":
                while ops[-1] != "(":
                    reduce()
                ops.pop()
            else:
                out.append(TOP if tok == "T" else BOT if tok == "F" else Prop(tok))
        while ops:
            reduce()
        assert len(out) == 1
        return out[0]


def brute_residual_exists(lat) -> bool:
    """Whether some table satisfies residuation, trying each cell independently."""
    n = lat.n
    for x in range(n):
        for y in range(n):
            if not any(all(lat.leq(lat.meet[z][x], y) == lat.leq(z, r) for z in range(n))
                       for r in range(n)):
                return False
    return True
