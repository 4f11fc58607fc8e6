"""JSON documents for semilattices, frames, lattices, valuations and proofs."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .algebra import ConditionalLattice
from .frame import SELECTION_KINDS, GeneralFrame
from .semilattice import Semilattice, validate_semilattice
from .syntax import ConsequencePair, parse_pair

__all__ = [
    "DocumentError", "load_json", "semilattice_from_doc", "semilattice_to_doc",
    "frame_from_doc", "frame_to_doc", "lattice_from_doc", "lattice_to_doc",
    "valuation_from_doc", "valuation_to_doc", "pairs_from_text",
]


class DocumentError(ValueError):
    """A JSON document that does not describe a valid structure."""


def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise DocumentError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from None


def _require(doc: Mapping, key: str, kind: type | tuple = object) -> Any:
    if not isinstance(doc, Mapping):
        raise DocumentError("document must be a JSON object")
    if key not in doc:
        raise DocumentError(f"missing key {key!r}")
    val = doc[key]
    if not isinstance(val, kind):
        raise DocumentError(f"key {key!r} has the wrong type")
    return val


def _elements(doc: Mapping) -> tuple[list[str], dict[str, int]]:
    names = _require(doc, "elements", list)
    if not names or not all(isinstance(x, str) for x in names):
        raise DocumentError("'elements' must be a nonempty list of names")
    if len(set(names)) != len(names):
        raise DocumentError("duplicate element names")
    return names, {nm: i for i, nm in enumerate(names)}


def _idx(index: Mapping[str, int], name: Any) -> int:
    if not isinstance(name, str) or name not in index:
        raise DocumentError(f"unknown element {name!r}")
    return index[name]


def _binary_table(doc: Mapping, key: str, index: Mapping[str, int],
                  unit: int | None, absorbing: int | None, symmetric: bool) -> list[list[int]]:
    """Read ``[[x, y, z], ...]`` triples into an n x n table.

    Diagonal entries default to idempotence, ``unit`` and ``absorbing`` fill
    their rows and columns, and with ``symmetric`` the transpose is implied.
    """
    n = len(index)
    tab: list[list[int | None]] = [[None] * n for _ in range(n)]
    if unit is not None or absorbing is not None or symmetric:
        for x in range(n):
            tab[x][x] = x
    if unit is not None:
        for x in range(n):
            tab[x][unit] = tab[unit][x] = x
    if absorbing is not None:
        for x in range(n):
            tab[x][absorbing] = tab[absorbing][x] = absorbing
    rows = _require(doc, key, list)
    for row in rows:
        if not isinstance(row, list) or len(row) != 3:
            raise DocumentError(f"entries of {key!r} must be [x, y, value] triples")
        x, y, v = (_idx(index, r) for r in row)
        for a, b in ((x, y), (y, x)) if symmetric else ((x, y),):
            if tab[a][b] is not None and tab[a][b] != v:
                raise DocumentError(f"conflicting {key} entries for {row[0]}, {row[1]}")
            tab[a][b] = v
    names = list(index)
    for x in range(n):
        for y in range(n):
            if tab[x][y] is None:
                raise DocumentError(f"{key} of {names[x]}, {names[y]} is not given")
    return tab  # type: ignore[return-value]


def semilattice_from_doc(doc: Mapping) -> Semilattice:
    names, index = _elements(doc)
    top = _idx(index, _require(doc, "top"))
    meet = _binary_table(doc, "meet", index, unit=top, absorbing=None, symmetric=True)
    s = Semilattice(tuple(names), top, tuple(map(tuple, meet)))
    bad = validate_semilattice(s)
    if bad:
        raise DocumentError(f"not a semilattice: {bad[0].law} at {bad[0].witness}")
    return s


def semilattice_to_doc(s: Semilattice) -> dict:
    nm = s.names
    meet = [[nm[x], nm[y], nm[s.meet[x][y]]]
            for x in range(s.n) for y in range(x + 1, s.n)
            if s.top not in (x, y)]
    return {"elements": list(nm), "top": nm[s.top], "meet": meet}


def _filter(s: Semilattice, names: Any) -> int:
    if not isinstance(names, list):
        raise DocumentError("a filter is a list of element names")
    try:
        return s.mask_from_names(names)
    except ValueError as e:
        raise DocumentError(str(e)) from None


def frame_from_doc(doc: Mapping) -> GeneralFrame:
    s = semilattice_from_doc(doc)
    adm_doc = doc.get("admissible", "all")
    if adm_doc == "all":
        adm = tuple(s.filters)
    elif isinstance(adm_doc, list):
        adm = tuple(dict.fromkeys(_filter(s, a) for a in adm_doc))
    else:
        raise DocumentError("'admissible' must be \"all\" or a list of filters")
    sel_doc = _require(doc, "selection", dict)
    kind = _require(sel_doc, "kind", str)
    if kind in SELECTION_KINDS:
        return GeneralFrame.build(s, kind, adm)
    if kind != "table":
        raise DocumentError(f"unknown selection kind {kind!r}")
    table: dict[int, list[int | None]] = {a: [None] * s.n for a in adm}
    for a in adm:
        table[a][s.top] = s.top_mask
    for entry in _require(sel_doc, "entries", list):
        if not isinstance(entry, Mapping):
            raise DocumentError("selection entries must be objects")
        x = _idx(s.index, _require(entry, "at"))
        a = _filter(s, _require(entry, "filter"))
        if a not in table:
            raise DocumentError(f"selection entry for non-admissible filter {s.show(a)}")
        table[a][x] = _filter(s, _require(entry, "value"))
    for a, col in table.items():
        for x, v in enumerate(col):
            if v is None:
                raise DocumentError(f"no selection value at {s.names[x]} for {s.show(a)}")
    return GeneralFrame(s, adm, {a: tuple(col) for a, col in table.items()})  # type: ignore[arg-type]


def frame_to_doc(g: GeneralFrame) -> dict:
    s = g.base
    doc = semilattice_to_doc(s)
    doc["admissible"] = "all" if g.is_full else [s.names_of(a) for a in g.admissible]
    entries = [{"at": s.names[x], "filter": s.names_of(a), "value": s.names_of(v)}
               for a in g.admissible for x, v in enumerate(g.selection[a])]
    doc["selection"] = {"kind": "table", "entries": entries}
    return doc


def lattice_from_doc(doc: Mapping) -> ConditionalLattice:
    names, index = _elements(doc)
    top = _idx(index, _require(doc, "top"))
    bot = _idx(index, _require(doc, "bot"))
    meet = _binary_table(doc, "meet", index, unit=top, absorbing=bot, symmetric=True)
    join = _binary_table(doc, "join", index, unit=bot, absorbing=top, symmetric=True)
    cto_doc = doc.get("cto", "top")
    if cto_doc == "top":
        cto = [[top] * len(names) for _ in names]
    else:
        cto = _binary_table(doc, "cto", index, unit=None, absorbing=None, symmetric=False)
    return ConditionalLattice(tuple(names), top, bot, tuple(map(tuple, meet)),
                              tuple(map(tuple, join)), tuple(map(tuple, cto)))


def lattice_to_doc(a: ConditionalLattice) -> dict:
    nm = a.names
    pairs = [(x, y) for x in range(a.n) for y in range(x + 1, a.n)]
    return {
        "elements": list(nm),
        "top": nm[a.top],
        "bot": nm[a.bot],
        "meet": [[nm[x], nm[y], nm[a.meet[x][y]]] for x, y in pairs
                 if a.top not in (x, y) and a.bot not in (x, y)],
        "join": [[nm[x], nm[y], nm[a.join[x][y]]] for x, y in pairs
                 if a.top not in (x, y) and a.bot not in (x, y)],
        "cto": [[nm[x], nm[y], nm[a.cto[x][y]]] for x in range(a.n) for y in range(a.n)],
    }


def valuation_from_doc(s: Semilattice, doc: Any) -> dict[str, int]:
    if not isinstance(doc, Mapping):
        raise DocumentError("a valuation maps atom names to filters")
    return {str(k): _filter(s, v) for k, v in doc.items()}


def valuation_to_doc(s: Semilattice, val: Mapping[str, int]) -> dict[str, list[str]]:
    return {k: s.names_of(v) for k, v in sorted(val.items())}


def pairs_from_text(text: str) -> list[ConsequencePair]:
    """One pair per nonblank line; ``#`` starts a comment."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse_pair(line))
    return out
