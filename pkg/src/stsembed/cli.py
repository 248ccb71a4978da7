"""Command-line entry point: ``stsembed <verb> ...``.

Exit codes: 0 complete and verified, 2 truncated but certified, 3 verification
failure, 4 input or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fileformat
from .core import leave_graph
from .doubling import double, find_six_cycle, six_cycle, verify_doubling
from .embedding import AmalgamationProblem, amalgamate, plan_embedding, run_embedding
from .errors import STSError
from .generators import GeneratorSpec
from .subsystems import class_violations, enumerate_subsystems, find_isomorphism

EXIT_OK, EXIT_TRUNCATED, EXIT_FAILED, EXIT_INPUT = 0, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(args, text: str, data: dict) -> None:
    if args.format == "structured":
        text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)


def _write_system(args, ps, certs=()) -> str:
    structured = args.format == "structured"
    if args.output:
        fileformat.write(args.output, ps, certs, structured=structured)
        return ""
    if structured:
        return ""
    return fileformat.dumps(ps, certs)


def _read(path):
    return fileformat.read(path).system


def cmd_gen(args) -> int:
    ps = GeneratorSpec(args.kind, args.parameter, args.seed).build()
    if args.output:
        _write_system(args, ps)
        sys.stdout.write(f"wrote {args.output} order={ps.order} blocks={len(ps.blocks)}\n")
    elif args.format == "structured":
        sys.stdout.write(fileformat.dumps_structured(ps))
    else:
        sys.stdout.write(fileformat.dumps(ps))
    return EXIT_OK


def _summary(ps) -> tuple[str, dict]:
    kind = "complete" if ps.is_complete else "partial"
    leave = len(leave_graph(ps).edges)
    text = f"{kind} order={ps.order} blocks={len(ps.blocks)}"
    if not ps.is_complete:
        text += f" leave={leave}"
    return text + "\n", {"complete": ps.is_complete, "order": ps.order,
                         "blocks": len(ps.blocks), "leave_edges": leave}


def cmd_verify(args) -> int:
    text, data = _summary(_read(args.input))
    _emit(args, text, data)
    return EXIT_OK


def cmd_subsystems(args) -> int:
    ps = _read(args.input)
    lat = enumerate_subsystems(ps, max_order=args.max_order, node_budget=args.budget)
    data = {"host_order": ps.order, "truncated": lat.truncated,
            "records": [{"order": r.order, "points": list(r.points)} for r in lat.records]}
    _emit(args, lat.report(), data)
    budget_hit = args.budget is not None and lat.closures_computed >= args.budget
    return EXIT_TRUNCATED if budget_hit else EXIT_OK


def cmd_double(args) -> int:
    ps = _read(args.input)
    if args.cycle:
        H = six_cycle(ps, [int(x) for x in args.cycle.split(",")])
    else:
        H = find_six_cycle(ps)
        if H is None:
            raise STSError("the leave contains no 6-cycle")
    res = double(ps, H, args.seed)
    rep = verify_doubling(ps, res, H)
    cert = res.certificate_line()
    text = _write_system(args, res.output, [cert])
    summary = (f"doubled order={ps.order} -> {res.output.order} "
               f"complete={int(res.output.is_complete)} verified={int(rep.ok)}\n")
    for f in rep.failures:
        summary += f"failure {f}\n"
    if args.format == "structured":
        data = fileformat.to_structured(res.output, [cert])
        data["verification"] = {"ok": rep.ok, "failures": rep.failures,
                                "type_census": {str(k): v for k, v in rep.type_census.items()}}
        _emit(args, "", data)
    else:
        sys.stdout.write(text if text else summary)
        if text:
            sys.stderr.write(summary)
    return EXIT_OK if rep.ok else EXIT_FAILED


def _run_exit(status: str, certified: bool) -> int:
    if status == "failed" or not certified and status == "complete":
        return EXIT_FAILED
    if status == "truncated":
        return EXIT_TRUNCATED
    return EXIT_OK


def _run_report(run) -> tuple[str, dict]:
    lines = [f"plan padded_order={run.plan.padded_order} cycles={run.plan.t}"]
    for c in run.certificates:
        lines.append(f"step {c.step} order={c.input_order}->{c.output_order} "
                     f"verified={int(c.verified)} ok={int(not c.failures)}")
        lines.append(c.line)
    lines.append(f"status {run.status}" + (f" ({run.reason})" if run.reason else ""))
    data = {"padded_order": run.plan.padded_order, "cycles": run.plan.t,
            "status": run.status, "reason": run.reason, "steps": run.steps,
            "certificates": [{"step": c.step, "input_order": c.input_order,
                              "output_order": c.output_order, "verified": c.verified,
                              "failures": c.failures,
                              **fileformat.parse_certificate(c.line)} for c in run.certificates]}
    return "\n".join(lines) + "\n", data


def cmd_embed(args) -> int:
    ps = _read(args.input)
    plan = plan_embedding(ps, seed=args.seed)
    name = args.name or Path(args.input).stem
    run = run_embedding(plan, step_limit=args.steps, verify=args.verify, seed=args.seed,
                        max_order=args.max_order, out_dir=args.out_dir, name=name)
    text, data = _run_report(run)
    _emit(args, text, data)
    return _run_exit(run.status, run.certified or args.verify == "off")


def _read_glue(path) -> dict[int, int]:
    ident = {}
    for ln in Path(path).read_text().splitlines():
        parts = ln.split()
        if not parts or parts[0].startswith("#"):
            continue
        if len(parts) != 2:
            raise STSError(f"bad glue line {ln!r}")
        ident[int(parts[0])] = int(parts[1])
    return ident


def cmd_amalgamate(args) -> int:
    problem = AmalgamationProblem(
        _read(args.left), _read(args.right),
        _read_glue(args.glue) if args.glue else {},
        [_read(f) for f in args.forbid or ()],
        _read(args.witness) if args.witness else None)
    name = args.name or "amalgam"
    res = amalgamate(problem, step_limit=args.steps, seed=args.seed, verify=args.verify,
                     max_order=args.max_order, out_dir=args.out_dir, name=name)
    text, data = _run_report(res.embedding)
    extra = [f"union order={res.union.order} blocks={len(res.union.blocks)}"]
    for c in res.step_checks:
        extra.append(f"check step={c['step']} order={c['order']} checked={int(c['checked'])} "
                     f"ok={int(c['ok'])}")
    data["union_order"] = res.union.order
    data["step_checks"] = res.step_checks
    data["status"] = res.status
    _emit(args, "\n".join(extra) + "\n" + text, data)
    return _run_exit(res.status, res.embedding.certified)


def cmd_iso(args) -> int:
    a, b = _read(args.first), _read(args.second)
    perm = find_isomorphism(a, b)
    text = "isomorphic\n" if perm is not None else "not isomorphic\n"
    if perm is not None:
        text += "map " + ",".join(map(str, perm)) + "\n"
    _emit(args, text, {"isomorphic": perm is not None, "map": perm})
    return EXIT_OK


def cmd_free(args) -> int:
    ps = _read(args.input)
    forbidden = [_read(f) for f in args.forbid or ()]
    if forbidden:
        hits = class_violations(ps, forbidden)
        lines = [f"hit member={k} " + rec.report_line() for rec, k in hits]
        data = {"free": not hits, "hits": [{"member": k, "order": r.order, "points": list(r.points)}
                                           for r, k in hits]}
    else:
        lat = enumerate_subsystems(ps, max_order=ps.order - 1)
        hits = [r for r in lat.records if 3 < r.order < ps.order]
        lines = [r.report_line() for r in hits]
        data = {"free": not hits, "hits": [{"order": r.order, "points": list(r.points)}
                                           for r in hits]}
    lines.insert(0, "free" if not hits else "not free")
    _emit(args, "\n".join(lines) + "\n", data)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-o", "--output")

    p = _Parser(prog="stsembed", description="Steiner triple system embedding toolkit")
    sub = p.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a system")
    g.add_argument("kind", choices=("pg", "ag", "bose", "skolem", "hexleave", "hexagon_leave",
                                    "random", "random_partial"))
    g.add_argument("parameter", type=int)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", parents=[common], help="validate a system file")
    v.add_argument("input")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("subsystems", parents=[common], help="list subsystems")
    s.add_argument("input")
    s.add_argument("--max-order", type=int)
    s.add_argument("--budget", type=int)
    s.set_defaults(func=cmd_subsystems)

    d = sub.add_parser("double", parents=[common], help="one doubling step")
    d.add_argument("input")
    d.add_argument("--cycle", help="comma-separated hexagon x1,...,x6 of the leave")
    d.set_defaults(func=cmd_double)

    for verb, func in (("embed", cmd_embed), ("amalgamate", cmd_amalgamate)):
        e = sub.add_parser(verb, parents=[common])
        if verb == "embed":
            e.add_argument("input")
        else:
            e.add_argument("left")
            e.add_argument("right")
            e.add_argument("--glue", help="file of 'left_point right_point' lines")
            e.add_argument("--forbid", nargs="*")
            e.add_argument("--witness")
        e.add_argument("--steps", type=int, default=3 if verb == "embed" else 1)
        e.add_argument("--verify", choices=("full", "steps", "off"), default="steps")
        e.add_argument("--max-order", type=int, default=4096)
        e.add_argument("--out-dir")
        e.add_argument("--name")
        e.set_defaults(func=func)

    i = sub.add_parser("iso", parents=[common], help="isomorphism test")
    i.add_argument("first")
    i.add_argument("second")
    i.set_defaults(func=cmd_iso)

    f = sub.add_parser("free", parents=[common], help="subsystem- or class-freeness")
    f.add_argument("input")
    f.add_argument("--forbid", nargs="*")
    f.set_defaults(func=cmd_free)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
    except (STSError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
