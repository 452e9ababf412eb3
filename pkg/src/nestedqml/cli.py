"""Command-line front end.

Exit codes: 0 proved / valid / reachable, 1 refuted / unreachable,
2 unknown, 3 parse or configuration error, 4 a check failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from .calculus import (
    CalculusConfig, Proof, RuleInstance, check_proof, instance_from_json,
    proof_from_json, proof_to_json,
)
from .grammar import Char
from .parsing import ParseError
from .reachability import Language, reach_relation, to_dot
from .search import Proved, Refuted, SearchBudget, prove
from .semantics import (
    Assignment, SearchSpaceTooLarge, check_frame, falsifiable_on, model_from_json,
    model_to_dot, model_to_json, satisfies_sequent,
)
from .sequent import (
    NestedSequent, format_sequent, parse_sequent, sequent_from_json, sequent_to_json, singleton,
)
from .syntax import Var, parse_formula, parse_term
from . import transform as tr

EXIT_OK, EXIT_REFUTED, EXIT_UNKNOWN, EXIT_INPUT, EXIT_CHECK = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


# ------------------------------------------------------------- helpers

def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _load_json(path: str) -> Any:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
        return json.loads(text)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def _config(args: argparse.Namespace, doc: dict | None = None) -> CalculusConfig:
    conds = args.conditions
    mode = getattr(args, "dp_mode", None)
    if doc is not None:
        if conds is None:
            conds = doc.get("conditions", "")
        if mode is None:
            mode = doc.get("dp_mode")
    return CalculusConfig.parse(conds or "", mode or "star")


def _goal(args: argparse.Namespace) -> NestedSequent:
    if getattr(args, "formula", None) is not None:
        return singleton(parse_formula(args.formula))
    if getattr(args, "sequent", None) is not None:
        return parse_sequent(args.sequent)
    if getattr(args, "input", None) is not None:
        data = _load_json(args.input)
        return sequent_from_json(data.get("goal", data))
    raise InputError("give --formula, --sequent or --input")


def _proof_doc(data: dict) -> Proof:
    return proof_from_json(data["proof"] if "proof" in data else data)


def _proof_dot(p: Proof) -> str:
    lines = ["digraph proof {", "  node [shape=box];"]
    counter = [0]

    def walk(q: Proof) -> str:
        me = f"n{counter[0]}"
        counter[0] += 1
        label = f"{format_sequent(q.conclusion, names=True)}\\n[{q.instance.rule}]".replace('"', '\\"')
        lines.append(f'  {me} [label="{label}"];')
        for sub in q.premises:
            lines.append(f"  {walk(sub)} -> {me};")
        return me

    walk(p)
    lines.append("}")
    return "\n".join(lines) + "\n"


def _emit(args: argparse.Namespace, text: str) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------ commands

def cmd_prove(args: argparse.Namespace) -> int:
    cfg = _config(args)
    goal = _goal(args)
    budget = SearchBudget(max_rounds=args.max_rounds, max_sequent_size=args.max_size,
                          max_fresh_terms=args.fresh_terms, max_seconds=args.timeout)
    res = prove(goal, cfg, budget)
    doc: dict[str, Any] = {"conditions": str(cfg.conditions), "dp_mode": cfg.dp_mode,
                           "goal": sequent_to_json(goal)}
    if isinstance(res, Proved):
        doc.update(result="proved", height=res.proof.height, size=res.proof.size,
                   proof=proof_to_json(res.proof), kernel=str(check_proof(res.proof, cfg)))
        code = EXIT_OK
        text = f"proved (height {res.proof.height}, {res.proof.size} nodes)\n{res.proof.pretty()}\n"
        dot = _proof_dot(res.proof)
    elif isinstance(res, Refuted):
        frame = check_frame(res.model, cfg.conditions)
        doc.update(result="refuted", model=model_to_json(res.model),
                   assignment={"values": dict(sorted(res.assignment.values.items())),
                               "default": res.assignment.default},
                   interpretation=dict(sorted(res.interpretation.items())),
                   verification={"frame": dict(sorted(frame.results.items())),
                                 "goal_falsified": not satisfies_sequent(res.model, res.assignment,
                                                                         res.interpretation, goal)})
        code = EXIT_REFUTED
        text = (f"refuted; counter-model with {len(res.model.worlds)} world(s)\n"
                + _dump({k: doc[k] for k in ("model", "assignment", "interpretation")}))
        dot = model_to_dot(res.model)
    else:
        doc.update(result="unknown", reason=res.reason)
        code = EXIT_UNKNOWN
        text = f"unknown: {res.reason}\n"
        dot = "digraph unknown {}\n"
    _emit(args, {"json": _dump(doc), "text": text, "dot": dot}[args.format])
    return code


def cmd_check_proof(args: argparse.Namespace) -> int:
    data = _load_json(args.file)
    cfg = _config(args, data)
    p = _proof_doc(data)
    rep = check_proof(p, cfg)
    if args.format == "json":
        _emit(args, _dump({"ok": rep.ok, "path": list(rep.path), "message": rep.message,
                           "height": p.height, "size": p.size}))
    else:
        _emit(args, f"{rep}\n")
    return EXIT_OK if rep.ok else EXIT_CHECK


def cmd_check_model(args: argparse.Namespace) -> int:
    data = _load_json(args.file)
    cfg = _config(args, data)
    model = model_from_json(data.get("model", data))
    frame = check_frame(model, cfg.conditions)
    out: dict[str, Any] = {"frame": dict(sorted(frame.results.items()))}
    ok = bool(frame)
    goal = None
    if args.formula is not None or args.sequent is not None:
        goal = _goal(args)
    elif "goal" in data:
        goal = sequent_from_json(data["goal"])
    if goal is not None and ok:
        if "assignment" in data and "interpretation" in data and args.formula is None and args.sequent is None:
            a = data["assignment"]
            sigma = Assignment(a["values"], a["default"])
            falsified = not satisfies_sequent(model, sigma, data["interpretation"], goal)
        else:
            try:
                falsified = falsifiable_on(model, goal) is not None
            except SearchSpaceTooLarge as exc:
                raise InputError(str(exc)) from exc
        out["goal_falsified"] = falsified
        ok = ok and falsified
    out["ok"] = ok
    if args.format == "json":
        _emit(args, _dump(out))
    elif args.format == "dot":
        _emit(args, model_to_dot(model))
    else:
        lines = [f"{k}: {'ok' if v else 'FAILED'}" for k, v in out["frame"].items()]
        if "goal_falsified" in out:
            lines.append(f"goal falsified: {'yes' if out['goal_falsified'] else 'no'}")
        lines.append("valid counter-model" if ok and goal is not None else ("ok" if ok else "check failed"))
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_CHECK


def _term(text: str | None, what: str):
    if text is None:
        raise InputError(f"--{what} is required")
    return parse_term(text)


def _req(value: Any, what: str) -> Any:
    if value is None:
        raise InputError(f"--{what} is required")
    return value


def _transforms() -> dict[str, Callable[[argparse.Namespace, Proof | None, CalculusConfig], Proof]]:
    f = lambda a: parse_formula(_req(a.phi, "phi"))  # noqa: E731
    at = lambda a: _req(a.at, "at")  # noqa: E731

    def inst(a: argparse.Namespace) -> RuleInstance:
        return instance_from_json(json.loads(_req(a.instance, "instance")))

    def cut(a, p, cfg):
        other = _proof_doc(_load_json(_req(a.with_proof, "with")))
        phi = f(a)
        g = p.conclusion.remove_formula(at(a), phi)
        return tr.eliminate_cut(g, at(a), phi, p, other, cfg)

    def gen_ax(a, p, cfg):
        g = parse_sequent(_req(a.sequent, "sequent"))
        return tr.generalized_axiom(g, a.at or g.name, f(a))

    return {
        "weaken": lambda a, p, cfg: tr.weaken(p, at(a), f(a)),
        "term-weaken": lambda a, p, cfg: tr.term_weaken(p, at(a), _term(a.term, "term")),
        "ext-weaken": lambda a, p, cfg: tr.ext_weaken(p, at(a), a.child),
        "nec": lambda a, p, cfg: tr.nec(p, a.child),
        "subst": lambda a, p, cfg: tr.subst_proof(p, _term(a.term, "term"), Var(_req(a.var, "var"))),
        "invert": lambda a, p, cfg: tr.invert(p, inst(a), a.index),
        "contract": lambda a, p, cfg: tr.contract(p, at(a), f(a)),
        "term-contract": lambda a, p, cfg: tr.term_contract(p, at(a), _term(a.term, "term")),
        "ext-contract": lambda a, p, cfg: tr.ext_contract(p, at(a), _req(a.target, "target"), _req(a.child, "child")),
        "shift": lambda a, p, cfg: tr.shift(p, at(a), _req(a.target, "target"), _req(a.child, "child"), cfg),
        "ebr": lambda a, p, cfg: tr.derive_ebr(p, a.n, Var(_req(a.var, "var"))),
        "cut": cut,
        "sym": lambda a, p, cfg: tr.eq_sym(p, at(a), _term(a.term, "term"), _term(a.term2, "term2")),
        "tra": lambda a, p, cfg: tr.eq_tra(p, at(a), _term(a.term, "term"), _term(a.term2, "term2"),
                                           _term(a.term3, "term3")),
        "grp": lambda a, p, cfg: tr.eq_grp(p, at(a), _term(a.term, "term"), _term(a.term2, "term2"),
                                           f(a), Var(_req(a.var, "var")), cfg),
        "generalized-axiom": gen_ax,
    }


def cmd_transform(args: argparse.Namespace) -> int:
    table = _transforms()
    if args.name == "generalized-axiom":
        cfg = _config(args)
        p = None
    else:
        data = _load_json(_req(args.file, "file"))
        cfg = _config(args, data)
        p = _proof_doc(data)
        rep = check_proof(p, cfg)
        if not rep:
            sys.stderr.write(f"input proof is invalid: {rep}\n")
            return EXIT_CHECK
    out = table[args.name](args, p, cfg)
    rep = check_proof(out, cfg)
    doc = {"conditions": str(cfg.conditions), "dp_mode": cfg.dp_mode, "transform": args.name,
           "height": out.height, "input_height": p.height if p else None,
           "proof": proof_to_json(out), "kernel": str(rep)}
    if args.format == "json":
        _emit(args, _dump(doc))
    elif args.format == "dot":
        _emit(args, _proof_dot(out))
    else:
        _emit(args, f"{args.name}: height {out.height}, {rep}\n{out.pretty()}\n")
    return EXIT_OK if rep else EXIT_CHECK


def cmd_reach(args: argparse.Namespace) -> int:
    cfg = _config(args)
    g = _goal(args)
    start = Char(args.start)
    lang = Language(cfg.sigma, (start,))
    rel = reach_relation(g.prop_graph(), lang)
    if args.source is not None or args.dest is not None:
        u, w = _req(args.source, "from"), _req(args.dest, "to")
        for v in (u, w):
            if v not in g:
                raise InputError(f"unknown component {v!r}")
        yes = (u, w) in rel
        payload: Any = {"from": u, "to": w, "start": start.value, "reachable": yes}
        code = EXIT_OK if yes else EXIT_REFUTED
    else:
        payload = {"start": start.value, "relation": sorted([list(p) for p in rel])}
        code = EXIT_OK
    if args.format == "json":
        _emit(args, _dump(payload))
    elif args.format == "dot":
        _emit(args, to_dot(g.prop_graph(), sorted(rel)))
    elif "reachable" in payload:
        _emit(args, ("reachable" if payload["reachable"] else "not reachable") + "\n")
    else:
        _emit(args, "".join(f"{u} -> {w}\n" for u, w in payload["relation"]))
    return code


# -------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nestedqml", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, goal: bool = True) -> None:
        p.add_argument("--conditions", default=None,
                       help='comma-separated frame conditions, e.g. "D,G(1,1),ID"')
        p.add_argument("--dp-mode", choices=("star", "literal"), default=None)
        p.add_argument("--format", choices=("text", "json", "dot"), default="json")
        p.add_argument("--output", "-o", default=None)
        if goal:
            p.add_argument("--formula", default=None)
            p.add_argument("--sequent", default=None)

    p = sub.add_parser("prove", help="search for a proof or a counter-model")
    common(p)
    p.add_argument("--input", default=None, help="JSON file holding a sequent")
    p.add_argument("--max-rounds", type=int, default=SearchBudget.max_rounds)
    p.add_argument("--max-size", type=int, default=SearchBudget.max_sequent_size)
    p.add_argument("--fresh-terms", type=int, default=SearchBudget.max_fresh_terms)
    p.add_argument("--timeout", type=float, default=None)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check-proof", help="re-check a proof JSON file")
    common(p, goal=False)
    p.add_argument("file")
    p.set_defaults(func=cmd_check_proof)

    p = sub.add_parser("check-model", help="verify a model (and optionally that it falsifies a goal)")
    common(p)
    p.add_argument("file")
    p.set_defaults(func=cmd_check_model)

    p = sub.add_parser("transform", help="apply a proof transformation")
    common(p, goal=False)
    p.add_argument("name", choices=sorted(_transforms()))
    p.add_argument("file", nargs="?", default=None)
    p.add_argument("--at")
    p.add_argument("--phi", help="formula parameter")
    p.add_argument("--sequent", help="context for generalized-axiom")
    p.add_argument("--term")
    p.add_argument("--term2")
    p.add_argument("--term3")
    p.add_argument("--var")
    p.add_argument("--target")
    p.add_argument("--child")
    p.add_argument("--instance", help="rule instance as JSON (for invert)")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--with", dest="with_proof", help="second proof file (for cut)")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("reach", help="path-language reachability in a sequent's propagation graph")
    common(p)
    p.add_argument("--start", choices=("fwd", "bwd"), default="fwd")
    p.add_argument("--from", dest="source")
    p.add_argument("--to", dest="dest")
    p.set_defaults(func=cmd_reach)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, ParseError, tr.TransformError, ValueError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
