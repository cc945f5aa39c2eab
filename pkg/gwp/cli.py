"""
CLI interface for gwp

Usage:
    python -m gwp wp grigorchuk word.txt
    python -m gwp cwp wreath:a5 program.slp
    python -m gwp slp length program.slp
    python -m gwp barrington compile circuit.txt --group a5 -o program.txt
    python -m gwp barrington check circuit.txt program.txt --group a5
    python -m gwp sens --group thompson --depth 3
    python -m gwp cwpreduce circuit.txt --m1 1 --group a5 --verify
    python -m gwp metrics --snapshot "description"

Exit codes: 0 trivial / ok, 1 nontrivial / mismatch, 2 error.
"""

import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Dict, Optional

from .barrington import (
    NandTreeCircuit,
    compile_program,
    nested_commutator,
    program_length,
    run_program,
    sweep,
)
from .config import get_config, parse_int, reset_config
from .cwp_reduction import build_pipeline, pipeline_lengths, verify_pipeline
from .errors import GwpError
from .formats import (
    dump_gprogram,
    dump_nandtree,
    dump_slp,
    dump_word,
    parse_circuit,
    parse_gprogram,
    parse_nandtree,
    parse_phi1,
    parse_slp,
    parse_word,
)
from .metrics import RunMetrics, get_metrics_db
from .registry import resolve_group, shift_letter_for
from .sens import get_provider
from .slp import (
    slp_at,
    slp_count,
    slp_depth,
    slp_expand,
    slp_invert,
    slp_length,
    slp_size,
    slp_substring,
)
from .wreath import embed_slp, handle_for, phi_n_slps

logger = logging.getLogger(__name__)

EXIT_TRIVIAL = 0
EXIT_NONTRIVIAL = 1
EXIT_ERROR = 2


def _int_arg(text: str) -> int:
    """argparse type for decimal integers with optional '_' separators"""
    try:
        return parse_int(text)
    except GwpError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: Optional[str], text: str):
    """Write to a file, or to stdout when no path is given"""
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _verdict(trivial: bool, as_json: bool, extra: Optional[Dict] = None) -> int:
    if as_json:
        out = {"trivial": trivial}
        out.update(extra or {})
        print(json.dumps(out, indent=2))
    else:
        print("TRIVIAL" if trivial else "NONTRIVIAL")
    return EXIT_TRIVIAL if trivial else EXIT_NONTRIVIAL


def cmd_wp(args):
    """Decide a word in a group"""
    spec = resolve_group(args.group)
    word = parse_word(_read(args.file), spec.alphabet)
    trivial = spec.oracle.is_trivial(word)
    return _verdict(trivial, args.json, {"group": spec.name, "length": len(word)})


def cmd_cwp(args):
    """Decide val(G) = 1 for an SLP G"""
    spec = resolve_group(args.group)
    g = parse_slp(_read(args.file), spec.alphabet)
    length = slp_length(g)
    trivial = spec.is_trivial_slp(g)
    return _verdict(
        trivial,
        args.json,
        {"group": spec.name, "length": str(length), "size": slp_size(g)},
    )


def cmd_slp(args):
    """Queries on a single SLP"""
    g = parse_slp(_read(args.file))
    op = args.slp_command

    if op == "expand":
        _write(args.output, dump_word(slp_expand(g, args.limit)))
    elif op == "length":
        if args.json:
            print(json.dumps({
                "length": str(slp_length(g)),
                "size": slp_size(g),
                "depth": slp_depth(g),
                "variables": len(g.rules),
            }, indent=2))
        else:
            print(slp_length(g))
    elif op == "at":
        print(slp_at(g, args.position))
    elif op == "count":
        print(slp_count(g, args.letter))
    elif op == "invert":
        _write(args.output, dump_slp(slp_invert(g)))
    elif op == "substring":
        _write(args.output, dump_slp(slp_substring(g, args.start, args.end)))
    return 0


def cmd_barrington(args):
    """Compile, run and check G-programs for nand-tree circuits"""
    op = args.barrington_command
    if op == "random":
        rng = random.Random(args.seed)
        circuit = NandTreeCircuit.random(args.depth, args.inputs, rng)
        _write(args.output, dump_nandtree(circuit))
        return 0

    provider = get_provider(args.group)

    if op == "compile":
        circuit = parse_nandtree(_read(args.file))
        program = compile_program(circuit, provider)
        expected = program_length(circuit, provider)
        if len(program) != expected:
            raise GwpError(f"compiled {len(program)} instructions, expected {expected}")
        _write(args.output, dump_gprogram(program))
        if args.output:
            print(f"Wrote {len(program)} instructions to {args.output}", file=sys.stderr)
        args.output_size = len(program)
        return 0

    if op == "run":
        program = parse_gprogram(_read(args.file), provider.alphabet)
        word = run_program(program, args.input)
        trivial = provider.oracle.is_trivial(word)
        if args.json:
            return _verdict(trivial, True, {"group": provider.name, "word": word.text()})
        print(word.text())
        return _verdict(trivial, False)

    # check
    circuit = parse_nandtree(_read(args.file))
    program = parse_gprogram(_read(args.program), provider.alphabet)
    mismatches = sweep(circuit, program, provider.oracle)
    args.details = {"inputs": 2 ** circuit.n_inputs, "mismatches": len(mismatches)}
    if args.json:
        print(json.dumps({
            "group": provider.name,
            "inputs": 2 ** circuit.n_inputs,
            "program_length": len(program),
            "agree": not mismatches,
            "mismatches": [m.to_dict() for m in mismatches],
        }, indent=2))
    else:
        for m in mismatches:
            print(f"MISMATCH {m.input}: circuit {m.circuit_value}, "
                  f"program {'trivial' if m.program_trivial else 'nontrivial'}")
        print(f"{2 ** circuit.n_inputs} inputs, {len(mismatches)} mismatches")
    return 0 if not mismatches else 1


def cmd_sens(args):
    """Show a leaf or the root of the nested commutators of a provider"""
    provider = get_provider(args.group)
    if args.leaf is not None:
        leaf = "" if args.leaf == "-" else args.leaf
        word = provider.leaf(args.depth, leaf)
    else:
        word = nested_commutator(provider, args.depth)
    if args.json:
        out = {
            "group": provider.name,
            "depth": args.depth,
            "leaf": args.leaf,
            "leaf_length": provider.leaf_length(args.depth),
            "length": len(word),
            "nontrivial": not provider.oracle.is_trivial(word),
            "word": word.text(),
        }
        print(json.dumps(out, indent=2))
    else:
        print(word.text())
    return 0


def cmd_cwpreduce(args):
    """Circuit -> subsetsum -> SLPs I and J over G wr Z"""
    spec = resolve_group(args.group)
    if spec.is_wreath:
        raise GwpError("cwpreduce takes a base group; the output lives in <group> wr Z")
    circuit = parse_circuit(_read(args.file))
    alphabet = spec.alphabet
    if args.generators:
        generators = [g.strip() for g in args.generators.split(",") if g.strip()]
    else:
        generators = list(alphabet.generators[: len(circuit.outputs)])
        if len(generators) < len(circuit.outputs):
            raise GwpError(
                f"{len(circuit.outputs)} outputs but {spec.name} has only "
                f"{len(generators)} letters; pass --generators"
            )
    out = build_pipeline(
        circuit,
        args.m1,
        generators,
        base_alphabet=alphabet,
        trust_one_hot=args.trust_one_hot,
        shift_letter=shift_letter_for(alphabet),
    )

    slp_j = out.slp_J
    if args.embed:
        parts = args.embed.split(",")
        if len(parts) != 3:
            raise GwpError("--embed expects PHI1_FILE,p,n")
        phi1 = parse_phi1(_read(parts[0]))
        embedding = phi_n_slps(
            phi1, parse_int(parts[1], "p"), parse_int(parts[2], "n"), out.shift_letter
        )
        slp_j = embed_slp(slp_j, embedding)

    if args.emit_i:
        Path(args.emit_i).write_text(dump_slp(out.slp_I), encoding="utf-8")
    if args.emit_subsetsum:
        Path(args.emit_subsetsum).write_text(
            json.dumps(out.subsetsum.to_dict(), indent=2) + "\n", encoding="utf-8"
        )
    if args.output or not args.json:
        _write(args.output, dump_slp(slp_j))

    summary = out.to_dict()
    summary["lengths"] = {k: str(v) for k, v in pipeline_lengths(out).items()}
    if args.embed:
        summary["embedded_length_J"] = str(slp_length(slp_j))
    code = 0
    if args.verify:
        base = handle_for(spec.oracle)
        report = verify_pipeline(out, base)
        summary["verify"] = report.to_dict(base)
        if not args.json:
            status = "ok" if report.ok else "FAILED"
            print(
                f"verify {status}: claim {'holds' if report.claim_ok else 'fails'}, "
                f"val(J) {'trivial' if report.j_trivial else 'nontrivial'}, "
                f"expected {'trivial' if report.expected_trivial else 'nontrivial'}",
                file=sys.stderr,
            )
        code = 0 if report.ok else 1
    args.details = summary
    args.output_size = len(slp_j.rules)
    if args.json:
        print(json.dumps(summary, indent=2))
    return code


def cmd_metrics(args):
    """Show run metrics and optionally save a snapshot"""
    metrics_db = get_metrics_db()

    if args.snapshot:
        snapshot_id = metrics_db.save_snapshot(args.snapshot)
        print(f"Saved snapshot #{snapshot_id}: {args.snapshot}")

    stats = metrics_db.get_stats()
    slow = metrics_db.get_slow_runs(threshold_ms=1000, limit=5)
    snapshots = metrics_db.get_snapshots(limit=5)

    if args.json:
        output = {
            "current": stats,
            "slow_runs": slow,
            "recent_snapshots": snapshots,
        }
        print(json.dumps(output, indent=2, default=str))
    elif "logging" in stats:
        print("Run logging is disabled (GWP_LOG_LEVEL=off)")
    else:
        print("=== Current Metrics ===")
        print(f"Total runs: {stats.get('total_runs', 0)}")
        print(f"Avg latency: {stats.get('avg_latency_ms', 0):.1f} ms")
        print(f"Max latency: {stats.get('max_latency_ms', 0)} ms")
        print(f"Trivial / nontrivial: {stats.get('trivial_count', 0)} / {stats.get('nontrivial_count', 0)}")
        print(f"Errors: {stats.get('error_count', 0)}")
        for command, count in stats.get("by_command", {}).items():
            print(f"  {command}: {count}")

        if slow:
            print("\n=== Slow Runs ===")
            for r in slow:
                print(f"  {r['command']} {r['group_name'] or '-'} {r['input_digest'][:8]}... "
                      f"avg={r['avg_latency']:.0f} ms count={r['count']}")

        if snapshots:
            print("\n=== Recent Snapshots ===")
            for s in snapshots:
                note = s.get("note", "-")[:30] if s.get("note") else "-"
                print(f"  #{s['id']} {s['timestamp'][:10]} runs={s.get('total_runs', 0)} note={note}")

    if args.compare:
        ids = args.compare.split(",")
        if len(ids) != 2:
            print("Error: --compare expects ID1,ID2", file=sys.stderr)
            return EXIT_ERROR
        comparison = metrics_db.compare_snapshots(parse_int(ids[0], "ID1"), parse_int(ids[1], "ID2"))
        print("\n=== Comparison ===")
        if "error" in comparison:
            print(f"Error: {comparison['error']}")
        elif comparison:
            changes = comparison.get("changes", {})
            print(f"From: #{comparison['from']['id']} ({comparison['from']['note']})")
            print(f"To: #{comparison['to']['id']} ({comparison['to']['note']})")

            latency_change = changes.get("avg_latency_ms", 0)
            indicator = "↑" if latency_change > 0 else "↓" if latency_change < 0 else "="
            print(f"  Latency: {indicator} {latency_change:+.1f} ms")

            error_change = changes.get("error_count", 0)
            indicator = "↑" if error_change > 0 else "↓" if error_change < 0 else "="
            print(f"  Errors: {indicator} {error_change:+d}")

            slow_change = changes.get("slow_runs", 0)
            indicator = "↑" if slow_change > 0 else "↓" if slow_change < 0 else "="
            print(f"  Slow runs: {indicator} {slow_change:+d}")

    return 0


def _verdict_name(command: str, code: int) -> Optional[str]:
    if code == EXIT_ERROR:
        return None
    if command in ("wp", "cwp") or (command == "barrington run"):
        return "trivial" if code == EXIT_TRIVIAL else "nontrivial"
    return "ok" if code == 0 else "failed"


def _command_name(args) -> str:
    sub = getattr(args, "slp_command", None) or getattr(args, "barrington_command", None)
    return f"{args.command} {sub}" if sub else args.command


def _run(args) -> int:
    """Run a command, mapping library errors to exit code 2 and recording metrics"""
    command = _command_name(args)
    input_text = ""
    path = getattr(args, "file", None)
    if path:
        try:
            input_text = _read(path)
        except OSError:
            pass
    metrics = RunMetrics.start(command, getattr(args, "group", None), input_text)
    metrics_db = get_metrics_db()

    try:
        code = args.func(args)
    except (GwpError, OSError) as e:
        logger.debug("%s failed", command, exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        metrics.finish(error=str(e))
        metrics_db.record(metrics)
        return EXIT_ERROR

    metrics.finish(_verdict_name(command, code), getattr(args, "output_size", 0))
    metrics_db.record(metrics)
    details = getattr(args, "details", None)
    if details:
        metrics_db.record_detail(command, details, input_text)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwp",
        description="Word problems, SLPs and circuit reductions for non-solvable groups",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    parser.add_argument("--expand-limit", type=_int_arg, help="Override GWP_EXPAND_LIMIT")
    parser.add_argument("--support-limit", type=_int_arg, help="Override GWP_SUPPORT_LIMIT")
    subparsers = parser.add_subparsers(dest="command", help="Commands")

    # wp
    wp_parser = subparsers.add_parser("wp", help="Decide whether a word is trivial")
    wp_parser.add_argument("group", help="Group selector (a5, f2, f3, grigorchuk, thompson, wreath:<base>[@t])")
    wp_parser.add_argument("file", help="Word file")
    wp_parser.add_argument("--json", action="store_true", help="JSON output")
    wp_parser.set_defaults(func=cmd_wp)

    # cwp
    cwp_parser = subparsers.add_parser("cwp", help="Decide whether an SLP derives a trivial word")
    cwp_parser.add_argument("group", help="Group selector")
    cwp_parser.add_argument("file", help="SLP file")
    cwp_parser.add_argument("--json", action="store_true", help="JSON output")
    cwp_parser.set_defaults(func=cmd_cwp)

    # slp
    slp_parser = subparsers.add_parser("slp", help="SLP queries")
    slp_sub = slp_parser.add_subparsers(dest="slp_command", required=True)

    expand_parser = slp_sub.add_parser("expand", help="Decompress to a word")
    expand_parser.add_argument("file", help="SLP file")
    expand_parser.add_argument("--limit", type=_int_arg, help="Expansion guard (default: GWP_EXPAND_LIMIT)")
    expand_parser.add_argument("-o", "--output", help="Output file (default: stdout)")

    length_parser = slp_sub.add_parser("length", help="Length of the derived word")
    length_parser.add_argument("file", help="SLP file")
    length_parser.add_argument("--json", action="store_true", help="JSON output with size and depth")

    at_parser = slp_sub.add_parser("at", help="Letter at a 0-based position")
    at_parser.add_argument("file", help="SLP file")
    at_parser.add_argument("position", type=_int_arg, help="Position")

    count_parser = slp_sub.add_parser("count", help="Occurrences of a letter")
    count_parser.add_argument("file", help="SLP file")
    count_parser.add_argument("letter", help="Letter")

    invert_parser = slp_sub.add_parser("invert", help="SLP for the inverse word")
    invert_parser.add_argument("file", help="SLP file")
    invert_parser.add_argument("-o", "--output", help="Output file (default: stdout)")

    substring_parser = slp_sub.add_parser("substring", help="SLP for positions START..END (inclusive)")
    substring_parser.add_argument("file", help="SLP file")
    substring_parser.add_argument("start", type=_int_arg, help="First position")
    substring_parser.add_argument("end", type=_int_arg, help="Last position")
    substring_parser.add_argument("-o", "--output", help="Output file (default: stdout)")
    slp_parser.set_defaults(func=cmd_slp)

    # barrington
    bar_parser = subparsers.add_parser("barrington", help="Nand-tree circuits to G-programs")
    bar_sub = bar_parser.add_subparsers(dest="barrington_command", required=True)

    compile_parser = bar_sub.add_parser("compile", help="Compile a nand-tree circuit")
    compile_parser.add_argument("file", help="Nand-tree circuit file")
    compile_parser.add_argument("--group", required=True, help="SENS provider group")
    compile_parser.add_argument("-o", "--output", help="Program file (default: stdout)")

    run_parser = bar_sub.add_parser("run", help="Evaluate a program on an input")
    run_parser.add_argument("file", help="G-program file")
    run_parser.add_argument("input", help="Input bit string")
    run_parser.add_argument("--group", required=True, help="SENS provider group")
    run_parser.add_argument("--json", action="store_true", help="JSON output")

    check_parser = bar_sub.add_parser("check", help="Compare program and circuit on every input")
    check_parser.add_argument("file", help="Nand-tree circuit file")
    check_parser.add_argument("program", help="G-program file")
    check_parser.add_argument("--group", required=True, help="SENS provider group")
    check_parser.add_argument("--json", action="store_true", help="JSON output")

    random_parser = bar_sub.add_parser("random", help="Write a random nand-tree circuit")
    random_parser.add_argument("--depth", type=_int_arg, required=True, help="Tree depth")
    random_parser.add_argument("--inputs", type=_int_arg, required=True, help="Number of inputs")
    random_parser.add_argument("--seed", type=_int_arg, default=0, help="Random seed (default: 0)")
    random_parser.add_argument("-o", "--output", help="Circuit file (default: stdout)")
    bar_parser.set_defaults(func=cmd_barrington)

    # sens
    sens_parser = subparsers.add_parser("sens", help="Nested commutator witnesses")
    sens_parser.add_argument("--group", required=True, help="SENS provider group")
    sens_parser.add_argument("--depth", type=_int_arg, required=True, help="Depth d")
    sens_parser.add_argument("--leaf", help="Leaf label v of length d ('-' for depth 0)")
    sens_parser.add_argument("--json", action="store_true", help="JSON output")
    sens_parser.set_defaults(func=cmd_sens)

    # cwpreduce
    red_parser = subparsers.add_parser("cwpreduce", help="Reduce a one-hot circuit to an SLP over G wr Z")
    red_parser.add_argument("file", help="Circuit file")
    red_parser.add_argument("--m1", type=_int_arg, required=True, help="Number of leading inputs in beta")
    red_parser.add_argument("--group", required=True, help="Base group")
    red_parser.add_argument("--generators", help="Comma separated labels a_0,...,a_(n-1)")
    red_parser.add_argument("-o", "--output", help="Output file for J (default: stdout)")
    red_parser.add_argument("--emit-i", metavar="FILE", help="Also write the SLP I")
    red_parser.add_argument("--emit-subsetsum", metavar="FILE", help="Also write the subsetsum data (JSON)")
    red_parser.add_argument("--verify", action="store_true", help="Check the reduction end to end")
    red_parser.add_argument("--embed", metavar="PHI1_FILE,p,n", help="Post-compose J with the iterated embedding")
    red_parser.add_argument("--trust-one-hot", action="store_true", help="Skip the exhaustive one-hot check")
    red_parser.add_argument("--json", action="store_true", help="JSON summary")
    red_parser.set_defaults(func=cmd_cwpreduce)

    # metrics
    metrics_parser = subparsers.add_parser("metrics", help="View run metrics and snapshots")
    metrics_parser.add_argument("--snapshot", metavar="NOTE", help="Save a snapshot with note")
    metrics_parser.add_argument("--compare", metavar="ID1,ID2", help="Compare two snapshots (e.g., --compare 1,2)")
    metrics_parser.add_argument("--json", action="store_true", help="JSON output")
    metrics_parser.set_defaults(func=cmd_metrics)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    if not args.command:
        parser.print_help()
        return 1

    try:
        reset_config()
        config = get_config()
    except GwpError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR
    if args.expand_limit is not None:
        config.expand_limit = args.expand_limit
    if args.support_limit is not None:
        config.support_limit = args.support_limit

    if args.command == "metrics":
        return args.func(args)
    return _run(args)


if __name__ == "__main__":
    sys.exit(main())
