"""Command-line front end.

Exit codes: 0 positive verdict, 1 negative verdict (non-convex input,
infeasible family, failed diagnostic), 2 usage, I/O, parse or precondition errors.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from importlib import resources
from pathlib import Path

from . import certificate as cert_mod
from .certificate import PreconditionError
from .convexity import check_convexity, is_convex
from .core import (ConvexityParams, Fn, Instance, InstanceError, SizeMismatch, dumps, format_rational,
                   parse_instance, parse_rational, serialize_instance)
from .generate import MAGMA_KINDS, STRATEGIES, GenerationError, GeneratorSpec, generate_instances
from .kkt import ConverseInapplicable, DegenerateMultiplierWarning, kkt_multipliers, kkt_verify_converse, \
    solve_mp_bruteforce
from .opcalc import DepthExceeded, format_term, parse_term, ratio, realize_table, synthesize_ratio

FIXTURES = ("counterexample", "max3", "zm_subadditive", "nonneg1", "kkt_max3", "kkt_slack")


class CliError(Exception):
    pass


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise CliError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    return resources.files("gcmax").joinpath("fixtures", f"{name}.json").read_text()


def load_instance(path: str | None) -> Instance:
    if path is None:
        raise CliError("--input is required")
    if path.startswith("fixture:"):
        text = fixture_text(path.split(":", 1)[1])
    elif path == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance(text)


def _r(x) -> str:
    return format_rational(x)


def _scalar(v) -> str:
    if isinstance(v, list):
        return "(" + ", ".join(str(e) for e in v) + ")"
    if isinstance(v, dict):
        return ", ".join(f"{a}={_scalar(b)}" for a, b in v.items())
    return str(v)


def _flat(v) -> bool:
    if isinstance(v, dict):
        return all(not isinstance(e, (dict, list)) or (isinstance(e, list) and _flat(e)) for e in v.values())
    if isinstance(v, list):
        return all(not isinstance(e, (dict, list)) for e in v)
    return True


def _human(doc, indent: int = 0) -> str:
    """YAML-ish rendering; flat records collapse onto one line."""
    pad = "  " * indent
    lines = []
    if isinstance(doc, dict):
        for k, v in doc.items():
            if _flat(v) and not (isinstance(v, dict) and len(v) > 4):
                lines.append(f"{pad}{k}: {_scalar(v)}")
            else:
                lines.append(f"{pad}{k}:")
                lines.append(_human(v, indent + 1))
    elif isinstance(doc, list):
        for item in doc:
            if _flat(item):
                lines.append(f"{pad}- {_scalar(item)}")
            else:
                body = _human(item, indent + 1).lstrip()
                lines.append(f"{pad}- {body}")
    else:
        lines.append(f"{pad}{doc}")
    return "\n".join(lines)


def emit(args, doc) -> None:
    text = _human(doc) + "\n" if args.human else dumps(doc)
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


# -- commands ---------------------------------------------------------------

def cmd_check(args) -> int:
    inst = load_instance(args.input)
    report = []
    all_convex = True
    for f in inst.functions:
        vs = check_convexity(inst.magma, inst.params.p, inst.params.q, f)
        all_convex &= not vs
        entry = {"name": f.name, "verdict": "convex" if not vs else "not convex"}
        if vs:
            entry["violations"] = [{"x": v.x, "y": v.y, "lhs": _r(v.lhs), "rhs": _r(v.rhs)} for v in vs]
        report.append(entry)
    emit(args, {"command": "check", "p": _r(inst.params.p), "q": _r(inst.params.q), "functions": report})
    return 0 if all_convex else 1


def cmd_solve(args) -> int:
    inst = load_instance(args.input)
    fns = list(inst.functions)
    if not fns:
        raise CliError("instance has no functions")
    if args.method == "lp":
        cert = cert_mod.solve_lp(fns)
    elif args.method == "two":
        if len(fns) != 2:
            raise CliError(f"method 'two' needs exactly 2 functions, instance has {len(fns)}")
        cert = cert_mod.solve_two(*fns)
    else:
        cert = cert_mod.solve_recursive(fns, inst.magma, inst.params)
    doc = {"command": "solve", "method": args.method, "functions": [f.name for f in fns]}
    doc.update(cert.to_dict())
    emit(args, doc)
    return 0 if cert.feasible else 1


def cmd_diagnose(args) -> int:
    inst = load_instance(args.input)
    fns = list(inst.functions)
    if not fns:
        raise CliError("instance has no functions")
    nf = cert_mod.check_nf_condition(fns)
    helly = cert_mod.helly_check(fns)
    nf_doc: dict = {"holds": nf.holds}
    if not nf.holds:
        nf_doc.update({"tuple": list(nf.tuple_), "t": [_r(v) for v in nf.t], "value": _r(nf.value)})
    helly_doc: dict = {"holds": helly.holds}
    if not helly.holds:
        helly_doc.update({"subset": list(helly.subset), "value": _r(helly.value)})
    polys = []
    for x in range(inst.magma.size):
        poly = cert_mod.lambda_polytope(fns, x)
        d = poly.to_dict()
        d["description"] = poly.describe()
        polys.append(d)
    emit(args, {"command": "diagnose", "nf_condition": nf_doc, "helly": helly_doc, "lambda_polytopes": polys})
    return 0 if nf.holds and helly.holds else 1


def _params_from(args) -> ConvexityParams:
    if args.p is not None and args.q is not None:
        return ConvexityParams(parse_rational(args.p, "--p"), parse_rational(args.q, "--q"))
    if args.input:
        return load_instance(args.input).params
    raise CliError("give --p and --q, or an --input instance")


def cmd_opcalc(args) -> int:
    params = _params_from(args)
    if args.action == "synth":
        if args.lo is None or args.hi is None:
            raise CliError("synth needs --lo and --hi")
        lo, hi = parse_rational(args.lo, "--lo"), parse_rational(args.hi, "--hi")
        if not (0 < lo <= hi < 1):
            raise CliError(f"target [{_r(lo)}, {_r(hi)}] is not inside (0, 1)")
        term = synthesize_ratio(params, lo, hi, max_depth=args.max_depth)
    else:
        if not args.term:
            raise CliError(f"{args.action} needs --term")
        term = parse_term(args.term, params)
        if term.depth > args.max_depth:
            raise DepthExceeded(f"term depth {term.depth} exceeds --max-depth {args.max_depth}")
    doc = {
        "command": "opcalc", "action": args.action, "p": _r(params.p), "q": _r(params.q),
        "term": format_term(term), "depth": term.depth,
        "coefficients": [_r(term.a), _r(term.b)], "ratio": _r(ratio(term)),
    }
    if args.action == "realize" or (args.input and args.action == "synth"):
        inst = load_instance(args.input)
        table = realize_table(term, inst.magma)
        doc["op_table"] = [list(row) for row in table]
        doc["transported"] = {
            f.name: is_convex(table, term.a, term.b, f)
            for f in inst.functions if is_convex(inst.magma, inst.params.p, inst.params.q, f)
        }
    emit(args, doc)
    return 0


def _element(inst: Instance, token: str) -> int:
    if inst.magma.elements and token in inst.magma.elements:
        return inst.magma.elements.index(token)
    try:
        x = int(token)
    except ValueError:
        raise CliError(f"unknown element {token!r}") from None
    if not 0 <= x < inst.magma.size:
        raise CliError(f"element {x} out of range")
    return x


def cmd_kkt(args) -> int:
    inst = load_instance(args.input)
    try:
        f0 = inst.function(args.objective)
    except KeyError:
        raise CliError(f"no function named {args.objective!r}") from None
    cons = [f for f in inst.functions if f.name != args.objective]
    x0 = _element(inst, args.x0)
    doc: dict = {"command": "kkt", "objective": f0.name, "constraints": [g.name for g in cons], "x0": x0}
    if args.shift_objective:
        c = f0[x0]
        f0 = Fn(f0.name, tuple(v - c for v in f0.values))
        doc["shift"] = _r(c)
        if not is_convex(inst.magma, inst.params.p, inst.params.q, f0):
            raise PreconditionError(
                f"shifting {args.objective} by {_r(c)} destroys (op, p, q)-convexity "
                f"(needs (p+q-1)*shift >= 0)")
    if args.verify is not None:
        lam = [parse_rational(v, "--verify") for v in args.verify]
        ok = kkt_verify_converse(f0, cons, x0, lam)
        fns = [f0, *cons]
        doc.update({
            "mode": "verify", "lambda": [_r(v) for v in lam],
            "transversality_products": [_r(lam[i] * fns[i][x0]) for i in range(1, len(fns))],
            "el_margin": _r(min(cert_mod.combination(fns, lam))),
            "minimizers": list(solve_mp_bruteforce(f0, cons)), "valid": ok,
        })
        emit(args, doc)
        return 0 if ok else 1
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateMultiplierWarning)
        res = kkt_multipliers(f0, cons, x0, inst.magma, inst.params)
    doc["mode"] = "multipliers"
    doc.update(res.to_dict())
    if res.lam[0] > 0:
        doc["converse"] = kkt_verify_converse(f0, cons, x0, res.lam)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    emit(args, doc)
    return 0


def cmd_gen(args) -> int:
    spec = GeneratorSpec(args.kind, args.m, parse_rational(args.p, "--p"), parse_rational(args.q, "--q"),
                         args.strategy, args.seed, args.count, args.n)
    instances, stats = generate_instances(spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = []
    for i, inst in enumerate(instances):
        path = out / f"instance_{i:03d}.json"
        path.write_text(serialize_instance(inst))
        names.append(path.name)
    emit(args, {"command": "gen", "files": names, "stats": str(stats)})
    return 0


def cmd_fixture(args) -> int:
    if args.name is None:
        sys.stdout.write("\n".join(FIXTURES) + "\n")
    else:
        sys.stdout.write(fixture_text(args.name))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="instance JSON file, '-' for stdin, or fixture:NAME")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--human", action="store_true", help="plain-text report instead of JSON")

    ap = argparse.ArgumentParser(prog="gcmax", description="Maximum-theorem certificates for (op,p,q)-convex functions")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("check", parents=[common], help="convexity verdict per function").set_defaults(func=cmd_check)

    sp = sub.add_parser("solve", parents=[common], help="find a nonnegative convex combination")
    sp.add_argument("--method", choices=("lp", "recursive", "two"), default="lp")
    sp.set_defaults(func=cmd_solve)

    sub.add_parser("diagnose", parents=[common], help="tuple condition, Helly check, Lambda_x list") \
        .set_defaults(func=cmd_diagnose)

    sp = sub.add_parser("opcalc", parents=[common], help="derived operations and their ratios")
    sp.add_argument("action", choices=("synth", "eval", "realize"))
    sp.add_argument("--p")
    sp.add_argument("--q")
    sp.add_argument("--lo")
    sp.add_argument("--hi")
    sp.add_argument("--term")
    sp.add_argument("--max-depth", type=int, default=64)
    sp.set_defaults(func=cmd_opcalc)

    sp = sub.add_parser("kkt", parents=[common], help="KKT multipliers or converse verification")
    sp.add_argument("--objective", default="f0")
    sp.add_argument("--x0", required=True, help="element index or name")
    sp.add_argument("--verify", nargs="+", metavar="LAMBDA")
    sp.add_argument("--shift-objective", action="store_true")
    sp.set_defaults(func=cmd_kkt)

    sp = sub.add_parser("gen", parents=[common], help="generate random convex instances")
    sp.add_argument("--kind", choices=MAGMA_KINDS, default="random-table")
    sp.add_argument("--m", type=int, default=4)
    sp.add_argument("--p", default="1")
    sp.add_argument("--q", default="1")
    sp.add_argument("--strategy", choices=STRATEGIES, default="structured")
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--n", type=int, default=2, help="functions per instance")
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("fixture", help="list or print the built-in fixtures")
    sp.add_argument("name", nargs="?")
    sp.set_defaults(func=cmd_fixture)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, InstanceError, SizeMismatch, PreconditionError, ConverseInapplicable,
            DepthExceeded, GenerationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
