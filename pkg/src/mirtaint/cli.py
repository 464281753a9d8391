"""Command-line front end.

    mirtaint analyze --ir prog.ir [--config models.json] [--no-icall]
                     [--seed f:bb0:load(r3+0x8)] [--dump-cfg f]
                     [--dump-aliases] [--dump-icalls]
                     [--out report.json] [--format json|text]
    mirtaint oracle certify --ir prog.ir --pairs pairs.json [--runs 16]
    mirtaint oracle fuzz [--count 500] [--max-len 30] [--seed 0]

Exit codes: 0 success, 1 alerts found (unless --exit-zero), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import ir, oracle
from . import sse as S
from .pipeline import InputError, Report, RunConfig, analyze, load_program


def _add_analyze_flags(p: argparse.ArgumentParser):
    p.add_argument("--ir", required=True, help="micro-IR source file")
    p.add_argument("--config", help="JSON taint-model config")
    p.add_argument("--no-icall", action="store_true",
                   help="disable indirect-call resolution (ablation)")
    p.add_argument("--seed", action="append", default=[],
                   metavar="FN:BLOCK:EXPR", help="manual alias query")
    p.add_argument("--dump-cfg", metavar="FN", help="emit a DOT CFG for FN")
    p.add_argument("--dump-aliases", action="store_true",
                   help="include alias sets for manual seeds in the report")
    p.add_argument("--dump-icalls", action="store_true",
                   help="include per-callsite resolution evidence")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--exit-zero", action="store_true",
                   help="exit 0 even when alerts were raised")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mirtaint",
        description="alias-driven taint checking for the micro-IR")
    sub = parser.add_subparsers(dest="cmd", required=True)

    pa = sub.add_parser("analyze", help="run the full pipeline")
    _add_analyze_flags(pa)

    po = sub.add_parser("oracle", help="concrete-execution utilities")
    osub = po.add_subparsers(dest="oracle_cmd", required=True)

    pc = osub.add_parser("certify", help="replay alias pairs concretely")
    pc.add_argument("--ir", required=True)
    pc.add_argument("--pairs", required=True, help="JSON list of pairs")
    pc.add_argument("--runs", type=int, default=16)
    pc.add_argument("--seed", type=int, default=0)

    pf = osub.add_parser("fuzz", help="differential fuzz of the alias engine")
    pf.add_argument("--count", type=int, default=500)
    pf.add_argument("--max-len", type=int, default=30)
    pf.add_argument("--seed", type=int, default=0)
    pf.add_argument("--runs", type=int, default=16)
    return parser


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cmd_analyze(args) -> int:
    config = RunConfig(
        ir_path=args.ir,
        config_path=args.config,
        enable_icall=not args.no_icall,
        seeds=tuple(args.seed),
        out_path=args.out,
        fmt=args.format,
        exit_zero_on_alerts=args.exit_zero,
        dump_cfg=args.dump_cfg,
        dump_aliases=args.dump_aliases,
        dump_icalls=args.dump_icalls,
    )
    try:
        report = analyze(config)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = report.to_json() if config.fmt == "json" else report.to_text()
    _emit(text, config.out_path)
    if report.alerts and not config.exit_zero_on_alerts:
        return 1
    return 0


def _parse_pair(entry: dict) -> oracle.AliasPair:
    from .alias import Cond

    def side(d):
        func, block, index = d["point"].rsplit(":", 2)
        return oracle.PairSide(S.parse_sse(d["expr"]),
                               ir.Point(func, block, int(index)),
                               d.get("phase", "post"))

    conds = tuple(
        Cond(c["reg"], bool(c["value"]),
             ir.Point(*c["point"].rsplit(":", 2)[:2],
                      int(c["point"].rsplit(":", 2)[2])))
        for c in entry.get("conds", ()))
    return oracle.AliasPair(side(entry["a"]), side(entry["b"]), conds)


def _cmd_certify(args) -> int:
    try:
        program = load_program(args.ir)
        with open(args.pairs, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        pairs = [_parse_pair(e) for e in raw]
    except (InputError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    verdicts = oracle.certify_aliases(program, pairs, n_runs=args.runs,
                                      seed=args.seed)
    print(json.dumps([v.as_json() for v in verdicts], indent=2, sort_keys=True))
    return 1 if any(v.status == "fail" for v in verdicts) else 0


def _cmd_fuzz(args) -> int:
    report = oracle.fuzz(count=args.count, max_len=args.max_len,
                         seed=args.seed, n_runs=args.runs)
    print(json.dumps({"programs": report["programs"], "pairs": report["pairs"],
                      "failures": len(report["failures"])}, sort_keys=True))
    for failure in report["failures"]:
        print(json.dumps(failure, indent=2, sort_keys=True), file=sys.stderr)
    return 1 if report["failures"] else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.cmd == "analyze":
        return _cmd_analyze(args)
    if args.cmd == "oracle":
        if args.oracle_cmd == "certify":
            return _cmd_certify(args)
        return _cmd_fuzz(args)
    raise AssertionError(args.cmd)


if __name__ == "__main__":
    sys.exit(main())
