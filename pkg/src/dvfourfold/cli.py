"""Command-line entry point: ``dvfourfold <subcommand> [flags]``.

Exit codes: 0 when every check passes, 1 when any check fails,
2 on usage or I/O errors.  JSON goes to stdout or ``--out``; logs and
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import harness, jsonio
from .errors import DVError
from .exactfield import FieldSpec, make_rng
from .triangle import frame_from_triangle, solve_triangle, triangle_checks
from .trivector import frame_components, is_zero_on

log = logging.getLogger("dvfourfold")

SUITE_KIND = {"ledger": "single", "tangent": "single", "triangle": "pair", "recovery": "triangle",
              "pairing": "triangle", "chain": "triangle", "boundary": "pair"}


class UsageError(Exception):
    pass


def _field(label: str) -> FieldSpec:
    try:
        return FieldSpec.from_label(label)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _emit(obj, out: str | None):
    text = jsonio.write(obj, out)
    if out is None:
        sys.stdout.write(text)


def _load(path: str | None) -> dict:
    if path is None:
        raise UsageError("--in FILE is required")
    try:
        return jsonio.read(path)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read {path}: {e}") from None


def cmd_gen(args) -> int:
    cfg = harness.ScenarioConfig(kind=args.kind, field=args.field or harness.GF(harness.DEFAULT_PRIME),
                                 seed=args.seed)
    inst, subs = harness.gen_instance(cfg)
    _emit(jsonio.scenario_file(inst, subs, cfg.kind), args.out)
    return 0


def cmd_complete(args) -> int:
    inst, subs = jsonio.load_scenario(_load(args.inp))
    if len(subs) < 2:
        raise UsageError("scenario needs at least two subspaces")
    w1, w2 = subs[:2]
    try:
        comp = solve_triangle(inst, w1, w2, make_rng(args.seed))
    except DVError as e:
        print(f"complete: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    f = inst.field
    record = {
        "instance": jsonio.instance_to_json(inst),
        "W1": jsonio.subspace_to_json(w1),
        "W2": jsonio.subspace_to_json(w2),
        "W3": jsonio.subspace_to_json(comp.w3),
        "systems": {"phi_det": f.to_str(comp.phi_det), "psi_det": f.to_str(comp.psi_det)},
        "checks": comp.checks,
    }
    _emit(record, args.out)
    return 0


def cmd_verify(args) -> int:
    data = _load(args.inp)
    inst, subs = jsonio.load_scenario(data)
    checks = {f"W{i + 1}_in_FX": is_zero_on(inst.alpha, w) for i, w in enumerate(subs)}
    if "W3" in data and len(subs) == 3:
        checks.update(triangle_checks(inst, *subs))
    ok = all(checks.values())
    _emit({"checks": checks, "ok": ok}, args.out)
    return 0 if ok else 1


def cmd_pairing(args) -> int:
    if args.inp is None:
        q = harness.witness_components(args.field or FieldSpec.from_label("q"))
    else:
        data = _load(args.inp)
        if "Q1" in data:
            q = jsonio.components_from_json(data)
        else:
            inst, subs = jsonio.load_scenario(data)
            if len(subs) != 3:
                raise UsageError("pairing needs Q blocks or a triangle scenario")
            q = frame_components(frame_from_triangle(inst, *subs).alpha_prime)
    summary = harness.pairing_summary(q)
    _emit(summary, args.out)
    consistent = summary["matches_direct_evaluation"] and summary["published_layout_equivalent"]
    for key in ("reduction_criterion_q3", "reduction_criterion_q1"):
        if summary[key] is not None:
            consistent &= summary[key] == summary["nondegenerate"]
    return 0 if consistent else 1


def _suite_cfg(args, kind: str) -> harness.ScenarioConfig:
    return harness.ScenarioConfig(kind=kind, field=args.field or harness.GF(harness.DEFAULT_PRIME),
                                  seed=args.seed, trials=args.trials, samples=args.samples)


def _run(args, names) -> int:
    reports = {n: harness.run_suite(n, _suite_cfg(args, SUITE_KIND[n]), args.jobs) for n in names}
    for name, rep in reports.items():
        log.info("%s: max trial %.3fs, %d failed checks", name, max(rep.timings), rep.failed)
    if len(names) == 1:
        out = reports[names[0]].to_dict(args.timings)
    else:
        out = harness.combined_report(reports, args.timings)
    _emit(out, args.out)
    return 0 if all(r.ok for r in reports.values()) else 1


def cmd_chain(args) -> int:
    return _run(args, ["chain"])


def cmd_boundary(args) -> int:
    return _run(args, ["boundary"])


def cmd_suite(args) -> int:
    names = args.only or list(harness.SUITES)
    return _run(args, names)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", type=_field, default=None, help="q or gf:P (default gf:10007; q for pairing)")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--in", dest="inp", metavar="FILE")
    common.add_argument("--out", metavar="FILE")
    common.add_argument("-v", "--verbose", action="store_true")

    runs = argparse.ArgumentParser(add_help=False)
    runs.add_argument("--trials", type=_positive, default=100)
    runs.add_argument("--samples", type=_positive, default=100)
    runs.add_argument("--jobs", type=_positive, default=1)
    runs.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte-identity)")

    p = argparse.ArgumentParser(prog="dvfourfold", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    g = sub.add_parser("gen", parents=[common], help="write a seeded scenario file")
    g.add_argument("--kind", choices=harness.KINDS, default="pair")
    g.set_defaults(func=cmd_gen)
    sub.add_parser("complete", parents=[common], help="complete a pair to a triangle").set_defaults(func=cmd_complete)
    sub.add_parser("verify", parents=[common], help="re-check a scenario or triangle record").set_defaults(func=cmd_verify)
    sub.add_parser("pairing", parents=[common], help="pairing determinant for Q blocks").set_defaults(func=cmd_pairing)
    sub.add_parser("chain", parents=[common, runs], help="cycle chain suite").set_defaults(func=cmd_chain)
    sub.add_parser("boundary", parents=[common, runs], help="boundary suite").set_defaults(func=cmd_boundary)
    s = sub.add_parser("suite", parents=[common, runs], help="every suite, one combined report")
    s.add_argument("--only", nargs="+", choices=list(harness.SUITES))
    s.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"{args.command}: {e}", file=sys.stderr)
        return 2
    except (KeyError, TypeError, ValueError) as e:
        print(f"{args.command}: malformed input: {e!r}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"{args.command}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
