"""``gk``: batch command line over the library.

Exit codes: 0 success, 1 property violation, 2 usage or input error,
3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .decomposition import (
    decompose,
    make_elementary,
    tree_of_decomposition,
    tree_stats,
    verify_elementary,
)
from .diagram import GENERIC, ParamDiagram
from .errors import AmbientNotClosed, DepthBudgetExceeded, GkError, NotElementary
from .functions import PiecewiseFunction, adapted_decomposition, check_function
from .fuzz import FuzzConfig, run_fuzz
from .grothendieck import cardinality, class_of_formula, satisfiable
from .primitive import classify_primitive
from .syntax import TRUE, Formula, parse, to_text

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class CliConfig:
    command: str
    formula: Optional[str] = None
    depth: Optional[int] = None
    diagram: Optional[str] = None
    format: str = "json"
    seed: int = 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def read_formula(text: str) -> Formula:
    """Formula text, or ``@path`` for a file holding it."""
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    return parse(text.strip())


def _diagram(args) -> ParamDiagram:
    return ParamDiagram.load(args.diagram) if args.diagram else GENERIC


def _emit(args, data, text: str) -> None:
    if args.format == "text":
        print(text)
    else:
        print(json.dumps(data, sort_keys=False))


# ---------------------------------------------------------------- commands


def cmd_class(args) -> int:
    c = class_of_formula(read_formula(args.formula), _diagram(args), args.depth)
    _emit(args, c.to_json(), str(c))
    return EXIT_OK


def cmd_card(args) -> int:
    card = cardinality(read_formula(args.formula), _diagram(args), args.depth)
    _emit(args, card.to_json(), str(card))
    return EXIT_OK


def cmd_sat(args) -> int:
    ok = satisfiable(read_formula(args.formula), _diagram(args), args.depth)
    _emit(args, {"sat": ok}, "sat" if ok else "unsat")
    return EXIT_OK


def cmd_classify(args) -> int:
    res = classify_primitive(read_formula(args.formula), _diagram(args))
    _emit(args, res.to_json(), res.kind)
    return EXIT_OK


def cmd_decompose(args) -> int:
    f = read_formula(args.formula)
    dec = decompose(f, args.depth, _diagram(args))
    out = {}
    if args.elementary:
        dec = make_elementary(dec)
        out["elementaryCheck"] = verify_elementary(dec).to_json()
    tree = tree_of_decomposition(dec)
    out["decomposition"] = dec.to_json()
    if args.elementary:
        try:
            out["stats"] = tree_stats(tree).to_json()
        except (AmbientNotClosed, NotElementary) as e:
            out["stats"] = None
            out["statsError"] = f"{type(e).__name__}: {e}"
    dot = tree.to_dot()
    if args.dot:
        Path(args.dot).write_text(dot)
    if args.format == "dot":
        sys.stdout.write(dot)
    else:
        text = "\n".join(f"{i}: [{pc.positive}] minus {pc.negative}" for i, pc in enumerate(dec.pieces))
        _emit(args, out, text or "(no pieces)")
    return EXIT_OK


def cmd_image(args) -> int:
    h = PiecewiseFunction.load(args.map)
    a = read_formula(args.set)
    diagram = _diagram(args)
    ad = adapted_decomposition(h, a, args.depth, diagram)
    img = ad.image_formula()
    dom_class, img_class = class_of_formula(a, diagram), ad.image_class(diagram)
    out = {
        "image": to_text(img),
        "domainClass": str(dom_class),
        "imageClass": str(img_class),
        "countsMatch": ad.counts_match(),
        "adapted": ad.to_json(),
    }
    _emit(args, out, to_text(img))
    return EXIT_OK if dom_class == img_class and ad.counts_match() else EXIT_VIOLATION


def cmd_checkfn(args) -> int:
    h = PiecewiseFunction.load(args.map)
    dom = read_formula(args.set) if args.set else None
    rep = check_function(h, dom, _diagram(args))
    _emit(args, rep.to_json(), "ok" if rep.ok else "\n".join(rep.problems))
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_fuzz(args) -> int:
    cfg = FuzzConfig(n=args.n, seed=args.seed, max_depth=args.max_depth)
    rep = run_fuzz(cfg)
    data = rep.to_json()
    data.pop("seconds")  # keeps the output byte-stable
    text = f"{rep.checked} formulas, {len(rep.disagreements)} disagreements"
    _emit(args, data, text)
    return EXIT_OK if rep.ok else EXIT_VIOLATION


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=None, help="unfolding depth override")
    common.add_argument("--diagram", default=None, help='JSON file {"equations": [[s, t], ...]}')
    common.add_argument("--format", choices=["json", "text", "dot"], default="json")

    parser = _Parser(prog="gk", description="Grothendieck classes of definable sets over pairing functions")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, fn, helptext in [
        ("class", cmd_class, "class in Z[X]/(X - X^2)"),
        ("card", cmd_card, "empty, finite(n) or infinite"),
        ("sat", cmd_sat, "satisfiability"),
        ("classify", cmd_classify, "empty / singleton / infinite for a primitive formula"),
    ]:
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("formula", help="formula text or @file")
        p.set_defaults(func=fn)

    p = sub.add_parser("decompose", parents=[common], help="decomposition into pieces B minus C")
    p.add_argument("formula")
    p.add_argument("--elementary", action="store_true", help="saturate to an elementary decomposition")
    p.add_argument("--dot", default=None, help="write the decomposition tree as DOT")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("image", parents=[common], help="image of a set under a piecewise map")
    p.add_argument("--map", required=True, help="map file (text 'piece G :: C' lines or JSON)")
    p.add_argument("--set", required=True, help="domain formula or @file")
    p.set_defaults(func=cmd_image)

    p = sub.add_parser("checkfn", parents=[common], help="validate a piecewise map and its injectivity")
    p.add_argument("--map", required=True)
    p.add_argument("--set", default=None, help="restrict the injectivity check to this domain")
    p.set_defaults(func=cmd_checkfn)

    p = sub.add_parser("fuzz", parents=[common], help="differential check of engine against oracle")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-depth", type=int, default=3)
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except DepthBudgetExceeded as e:
        print(f"gk: budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (GkError, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"gk: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
