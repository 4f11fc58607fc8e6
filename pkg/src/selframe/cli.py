"""Command-line front end: JSON documents in, JSON reports out.

Exit codes: 0 affirmative, 1 negative, 2 unknown or budget, 64 usage error,
65 bad input document.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from . import algebra, duality, extensions, frame, search
from .io import (
    DocumentError, frame_from_doc, frame_to_doc, lattice_from_doc, lattice_to_doc,
    load_json, pairs_from_text, semilattice_from_doc, semilattice_to_doc,
    valuation_from_doc, valuation_to_doc,
)
from .semilattice import validate_semilattice
from .syntax import ParseError, parse_formula, parse_pair, print_pair

EXIT_OK, EXIT_NEG, EXIT_UNKNOWN, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65

BUDGET_KEYS = ("max_frame_size", "max_depth", "max_tables_per_frame", "wall_ms")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        raise UsageError(message)


def parse_budget(text: str | None) -> search.Budget:
    if not text:
        return search.Budget()
    vals: dict[str, int] = {}
    for item in text.split(","):
        key, sep, val = item.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in BUDGET_KEYS:
            raise UsageError(f"bad budget item {item!r}; keys are {', '.join(BUDGET_KEYS)}")
        try:
            vals[key] = int(val)
        except ValueError:
            raise UsageError(f"budget value for {key} must be an integer") from None
    return search.Budget(**vals)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _gamma(args) -> list:
    out = [parse_pair(t) for t in args.gamma or ()]
    if getattr(args, "gamma_file", None):
        try:
            with open(args.gamma_file, encoding="utf-8") as fh:
                out.extend(pairs_from_text(fh.read()))
        except OSError as e:
            raise DocumentError(f"cannot read {args.gamma_file}: {e.strerror}") from None
    return out


def _pair(args):
    if args.pair is not None:
        return parse_pair(args.pair)
    if args.pair_file:
        try:
            with open(args.pair_file, encoding="utf-8") as fh:
                pairs = pairs_from_text(fh.read())
        except OSError as e:
            raise DocumentError(f"cannot read {args.pair_file}: {e.strerror}") from None
        if len(pairs) != 1:
            raise DocumentError("pair file must hold exactly one pair")
        return pairs[0]
    raise UsageError("one of --pair or --pair-file is required")


def _axiom(name: str):
    try:
        return extensions.Axiom(name)
    except ValueError:
        raise UsageError(f"unknown axiom {name!r}") from None


def _fill(name: str):
    try:
        return extensions.FillIn(name)
    except ValueError:
        raise UsageError(f"unknown fill-in {name!r}; use k1, kup or kr") from None


def _violations(vs) -> list[dict]:
    return [{"law": v.law, "witness": [str(w) for w in v.witness]} for v in vs]


def _countermodel_doc(cm: search.Countermodel) -> dict:
    s = cm.frame.base
    return {
        "frame": frame_to_doc(cm.frame),
        "valuation": valuation_to_doc(s, cm.valuation),
        "world": s.names[cm.world],
    }


def _frame_checked(path: str):
    g = frame_from_doc(load_json(path))
    bad = frame.validate_frame(g)
    if bad:
        raise DocumentError(f"ill-formed frame: {bad[0].law} at {', '.join(map(str, bad[0].witness))}")
    return g


def _lattice_checked(path: str):
    a = lattice_from_doc(load_json(path))
    bad = algebra.validate_conditional_lattice(a)
    if bad:
        raise DocumentError(f"invalid conditional lattice: {bad[0].law} at {bad[0].witness}")
    return a


# ---------------------------------------------------------------------------
# commands; each returns (exit code, report)
# ---------------------------------------------------------------------------

def cmd_validate(args) -> tuple[int, dict]:
    if args.frame:
        g = frame_from_doc(load_json(args.frame))
        vs = frame.validate_frame(g)
        kind = "frame"
    elif args.lattice:
        vs = algebra.validate_conditional_lattice(lattice_from_doc(load_json(args.lattice)))
        kind = "conditional-lattice"
    elif args.semilattice:
        doc = load_json(args.semilattice)
        try:
            vs = validate_semilattice(semilattice_from_doc(doc))
        except DocumentError as e:
            return EXIT_NEG, {"kind": "semilattice", "valid": False, "error": str(e)}
        kind = "semilattice"
    else:
        raise UsageError("give --frame, --lattice or --semilattice")
    return (EXIT_OK if not vs else EXIT_NEG,
            {"kind": kind, "valid": not vs, "violations": _violations(vs)})


def cmd_eval(args) -> tuple[int, dict]:
    g = _frame_checked(args.frame)
    val = valuation_from_doc(g.base, json.loads(args.valuation))
    f = parse_formula(args.formula)
    try:
        truth = frame.eval_formula(frame.Model(g, val), f)
    except frame.UnknownAtom as e:
        raise DocumentError(f"atom {e.args[0]} has no value") from None
    return EXIT_OK, {"formula": str(f), "truth_set": g.base.names_of(truth)}


def cmd_check(args) -> tuple[int, dict]:
    g = _frame_checked(args.frame)
    cp = _pair(args)
    hit = frame.find_refutation(g, cp)
    report: dict[str, Any] = {"pair": print_pair(cp), "validates": hit is None}
    if hit is not None:
        report["valuation"] = valuation_to_doc(g.base, hit[0])
        report["world"] = g.base.names[hit[1]]
    return (EXIT_OK if hit is None else EXIT_NEG), report


def cmd_prove(args) -> tuple[int, dict]:
    cp = _pair(args)
    gamma = _gamma(args)
    t = search.derive(cp, gamma, args.depth)
    if t is None:
        return EXIT_UNKNOWN, {"pair": print_pair(cp), "derived": False, "depth": args.depth}
    return EXIT_OK, {"pair": print_pair(cp), "derived": True,
                     "checked": search.check_proof(t, gamma), "proof": t.to_json()}


def cmd_refute(args) -> tuple[int, dict]:
    cp = _pair(args)
    cm = search.find_countermodel(cp, _gamma(args), max_n=args.max_n, strategy=args.strategy,
                                  max_tables=args.max_tables, seed=args.seed)
    if cm is None:
        return EXIT_UNKNOWN, {"pair": print_pair(cp), "refuted": False, "max_n": args.max_n}
    return EXIT_NEG, {"pair": print_pair(cp), "refuted": True, **_countermodel_doc(cm)}


def cmd_decide(args) -> tuple[int, dict]:
    cp = _pair(args)
    v = search.decide(cp, _gamma(args), parse_budget(args.budget), seed=args.seed,
                      strategy=args.strategy)
    report: dict[str, Any] = {"pair": print_pair(cp), "verdict": v.kind}
    if isinstance(v, search.Derivable):
        report["proof"] = v.proof.to_json()
        return EXIT_OK, report
    if isinstance(v, search.Refuted):
        report.update(_countermodel_doc(v.countermodel))
        return EXIT_NEG, report
    report["budget"] = v.report
    return EXIT_UNKNOWN, report


def cmd_dual(args) -> tuple[int, dict]:
    if args.hom:
        doc = load_json(args.hom)
        a = lattice_from_doc(doc.get("source", {}))
        b = lattice_from_doc(doc.get("target", {}))
        mapping = doc.get("map")
        if not isinstance(mapping, dict):
            raise DocumentError("homomorphism document needs a 'map' object")
        try:
            h = [b.names.index(mapping[nm]) for nm in a.names]
        except (KeyError, ValueError) as e:
            raise DocumentError(f"map is not total on known elements: {e}") from None
        if not algebra.is_homomorphism(h, a, b):
            return EXIT_NEG, {"homomorphism": False}
        f, fb, fa = duality.dual_hom(h, a, b)
        vs = frame.check_selection_morphism(f, fb.frame, fa.frame)
        return (EXIT_OK if not vs else EXIT_NEG), {
            "homomorphism": True,
            "map": {fb.frame.base.names[p]: fa.frame.base.names[q] for p, q in enumerate(f)},
            "violations": _violations(vs),
        }
    if args.lattice:
        ff = duality.filter_frame(_lattice_checked(args.lattice))
        return EXIT_OK, {"frame": frame_to_doc(ff.frame)}
    if args.frame:
        return EXIT_OK, {"algebra": lattice_to_doc(frame.complex_algebra(_frame_checked(args.frame)))}
    raise UsageError("give --lattice, --frame or --hom")


def cmd_theta_check(args) -> tuple[int, dict]:
    a = _lattice_checked(args.lattice)
    vs = duality.theta_check(a)
    ok = not vs and duality.triangle_algebra(a)
    return (EXIT_OK if ok else EXIT_NEG), {"iso": not vs, "triangle": ok,
                                           "violations": _violations(vs)}


def cmd_eta_check(args) -> tuple[int, dict]:
    g = _frame_checked(args.frame)
    vs = duality.eta_check(g)
    ok = not vs and duality.triangle_frame(g)
    return (EXIT_OK if ok else EXIT_NEG), {"iso": not vs, "triangle": ok,
                                           "violations": _violations(vs)}


def cmd_fillin(args) -> tuple[int, dict]:
    g = _frame_checked(args.frame)
    return EXIT_OK, {"frame": frame_to_doc(extensions.fill_in(g, _fill(args.kind)))}


def cmd_correspond(args) -> tuple[int, dict]:
    g = _frame_checked(args.frame)
    ax = _axiom(args.axiom)
    try:
        cond = extensions.corr_check(g, ax, primed=args.primed)
    except extensions.NoCorrespondence as e:
        raise UsageError(str(e)) from None
    except ValueError as e:
        raise UsageError(str(e)) from None
    valid = frame.validates(g, ax.pair)
    return (EXIT_OK if cond else EXIT_NEG), {
        "axiom": ax.value, "primed": args.primed, "condition": cond,
        "validates": valid, "agree": cond == valid,
    }


def cmd_persist(args) -> tuple[int, dict]:
    ax, k = _axiom(args.axiom), _fill(args.kind)
    if args.frame:
        g = _frame_checked(args.frame)
        ok = extensions.persistence_test(g, ax, k)
        return (EXIT_OK if ok else EXIT_NEG), {"axiom": ax.value, "kind": k.value, "persists": ok}
    hit = extensions.find_persistence_failure(
        ax, k, max_n=args.max_n, max_tables=args.max_tables, seed=args.seed,
        require_descriptive=not args.any_general)
    report: dict[str, Any] = {"axiom": ax.value, "kind": k.value, "failure_found": hit is not None}
    if hit is None:
        return EXIT_OK, report
    g, val, world = hit
    report.update({"filled_frame": frame_to_doc(g),
                   "valuation": valuation_to_doc(g.base, val), "world": g.base.names[world]})
    return EXIT_NEG, report


def cmd_enumerate(args) -> tuple[int, dict]:
    if args.what == "semilattices":
        ss = search.enumerate_semilattices(args.n, up_to_iso=not args.labeled)
        return EXIT_OK, {"n": args.n, "count": len(ss),
                         "semilattices": [semilattice_to_doc(s) for s in ss]}
    if not args.semilattice:
        raise UsageError("enumerate selections needs --semilattice")
    s = semilattice_from_doc(load_json(args.semilattice))
    strategy = "exhaustive" if args.strategy == "auto" else args.strategy
    try:
        tables = list(search.generate_selections(s, strategy=strategy, seed=args.seed,
                                                 k=args.max_tables, budget=args.max_tables))
    except OverflowError as e:
        return EXIT_UNKNOWN, {"error": str(e)}
    frames = [frame.GeneralFrame(s, s.filters, t) for t in tables]
    return EXIT_OK, {"count": len(frames), "frames": [frame_to_doc(g) for g in frames]}


def cmd_int_eval(args) -> tuple[int, dict]:
    s = semilattice_from_doc(load_json(args.semilattice))
    val = valuation_from_doc(s, json.loads(args.valuation))
    f = parse_formula(args.formula)
    try:
        truth = extensions.int_eval(s, val, f)
    except extensions.NotDistributive as e:
        raise DocumentError(str(e)) from None
    except KeyError as e:
        raise DocumentError(f"atom {e.args[0]} has no value") from None
    return EXIT_OK, {"formula": str(f), "truth_set": s.names_of(truth)}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="selframe", description=__doc__.splitlines()[0])
    p.add_argument("--format", choices=("json", "text"), default="json")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def pair_args(sp, gamma: bool = True) -> None:
        sp.add_argument("--pair", help='consequence pair, e.g. "p |- p"')
        sp.add_argument("--pair-file")
        if gamma:
            sp.add_argument("--gamma", action="append", help="extra pair of Γ (repeatable)")
            sp.add_argument("--gamma-file", help="file with one pair of Γ per line")

    def search_args(sp) -> None:
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--strategy", choices=("auto", "named", "exhaustive", "sampled"),
                        default="auto")

    sp = sub.add_parser("validate", help="check a semilattice, frame or lattice document")
    sp.add_argument("--frame")
    sp.add_argument("--lattice")
    sp.add_argument("--semilattice")
    sp.set_defaults(run=cmd_validate)

    sp = sub.add_parser("eval", help="truth set of a formula in a model")
    sp.add_argument("--frame", required=True)
    sp.add_argument("--valuation", required=True, help='JSON, e.g. {"p": ["1", "a"]}')
    sp.add_argument("--formula", required=True)
    sp.set_defaults(run=cmd_eval)

    sp = sub.add_parser("check", help="does a frame validate a pair")
    sp.add_argument("--frame", required=True)
    pair_args(sp, gamma=False)
    sp.set_defaults(run=cmd_check)

    sp = sub.add_parser("prove", help="bounded derivation search")
    pair_args(sp)
    sp.add_argument("--depth", type=int, default=6)
    sp.set_defaults(run=cmd_prove)

    sp = sub.add_parser("refute", help="countermodel search over full frames")
    pair_args(sp)
    search_args(sp)
    sp.add_argument("--max-n", type=int, default=5)
    sp.add_argument("--max-tables", type=int, default=200)
    sp.set_defaults(run=cmd_refute)

    sp = sub.add_parser("decide", help="interleaved derivation and countermodel search")
    pair_args(sp)
    search_args(sp)
    sp.add_argument("--budget", help="e.g. max_depth=6,max_frame_size=5,wall_ms=10000")
    sp.set_defaults(run=cmd_decide)

    sp = sub.add_parser("dual", help="filter frame, complex algebra or dual homomorphism")
    sp.add_argument("--lattice")
    sp.add_argument("--frame")
    sp.add_argument("--hom", help='JSON with "source", "target" lattices and "map"')
    sp.set_defaults(run=cmd_dual)

    sp = sub.add_parser("theta-check", help="θ is an isomorphism onto the double dual")
    sp.add_argument("--lattice", required=True)
    sp.set_defaults(run=cmd_theta_check)

    sp = sub.add_parser("eta-check", help="η is a bijective selection morphism")
    sp.add_argument("--frame", required=True)
    sp.set_defaults(run=cmd_eta_check)

    sp = sub.add_parser("fillin", help="extend a selection to all filters")
    sp.add_argument("--frame", required=True)
    sp.add_argument("--kind", required=True, help="k1, kup or kr")
    sp.set_defaults(run=cmd_fillin)

    sp = sub.add_parser("correspond", help="frame condition of an axiom")
    sp.add_argument("--frame", required=True)
    sp.add_argument("--axiom", required=True)
    sp.add_argument("--primed", action="store_true")
    sp.set_defaults(run=cmd_correspond)

    sp = sub.add_parser("persist", help="fill-in persistence on a frame or by search")
    sp.add_argument("--axiom", required=True)
    sp.add_argument("--kind", required=True)
    sp.add_argument("--frame")
    sp.add_argument("--max-n", type=int, default=4)
    sp.add_argument("--max-tables", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--any-general", action="store_true",
                    help="also search frames whose family does not separate points")
    sp.set_defaults(run=cmd_persist)

    sp = sub.add_parser("enumerate", help="semilattices or selection tables")
    sp.add_argument("what", choices=("semilattices", "selections"))
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--labeled", action="store_true")
    sp.add_argument("--semilattice")
    sp.add_argument("--max-tables", type=int, default=10000)
    search_args(sp)
    sp.set_defaults(run=cmd_enumerate)

    sp = sub.add_parser("int-eval", help="intuitionistic truth set on a distributive semilattice")
    sp.add_argument("--semilattice", required=True)
    sp.add_argument("--valuation", required=True)
    sp.add_argument("--formula", required=True)
    sp.set_defaults(run=cmd_int_eval)
    return p


def _text(report: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(report, dict):
        for k, v in report.items():
            if isinstance(v, list) and all(isinstance(w, str) for w in v):
                lines.append(f"{pad}{k}: {{{', '.join(v)}}}")
            elif isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(report, list):
        for v in report:
            if isinstance(v, (dict, list)):
                lines.extend(_text(v, indent))
                lines.append(f"{pad}--")
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{report}")
    return lines


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    fmt = "json"
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        code, report = args.run(args)
    except UsageError as e:
        code, report = EXIT_USAGE, {"error": str(e)}
    except (DocumentError, ParseError) as e:
        code, report = EXIT_DATA, {"error": str(e)}
    report = {"exit": code, **report}
    if fmt == "text":
        out.write("\n".join(_text(report)) + "\n")
    else:
        out.write(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
