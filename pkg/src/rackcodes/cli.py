"""Command-line interface: ``rackcodes <command> ...``.

Exit codes: 0 success, 2 parameter error, 3 unrecoverable data, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import chunks
from .codes import build_code
from .errors import (InconsistentDataError, InsufficientDataError, ParameterError, UnrecoverableError)
from .gf import FieldSpec, make_field
from .params import (FLOWGRAPH_MAX_NBAR, FLOWGRAPH_MAX_U, CodeParams, Mode, derive, flowgraph_mincut,
                     general_cutset_bound)
from .rack_sim import Cluster, FailurePattern, RepairClass, RepairReport, classify, lowest_index, seeded_random

EXIT_OK, EXIT_PARAM, EXIT_UNRECOVERABLE, EXIT_IO = 0, 2, 3, 4


def _add_code_args(ap: argparse.ArgumentParser, mode_default: str | None = "msrr"):
    g = ap.add_argument_group("code parameters")
    g.add_argument("-n", type=int, required=True, help="total nodes (nbar * u)")
    g.add_argument("-u", type=int, required=True, help="nodes per rack")
    g.add_argument("-k", type=int, required=True, help="any k nodes recover the file")
    g.add_argument("-l", type=int, required=True, help="local helpers in the host rack")
    g.add_argument("--dbar", type=int, required=True, help="helper racks")
    if mode_default is not None:
        g.add_argument("--mode", choices=[m.value for m in Mode], default=mode_default)
    g.add_argument("--field", help="prime:Q, gf2:M or gf2:M:POLY (default: chosen from n and u)")


def _params(args) -> CodeParams:
    return CodeParams(args.n, args.u, args.k, args.l, args.dbar)


def _field(args):
    return make_field(FieldSpec.parse(args.field)) if args.field else None


def _labels(text: str | None, u: int) -> list[tuple[int, int]] | None:
    """Parse ``0.1,2.3`` (rack.node) or flat indices ``5,9``."""
    if text is None:
        return None
    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            if "." in item:
                e, g = item.split(".")
                out.append((int(e), int(g)))
            else:
                out.append(divmod(int(item), u))
        except ValueError:
            raise ParameterError(f"cannot parse node {item!r}", "node syntax e.g or index") from None
    return out


def _ints(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ParameterError(f"cannot parse list {text!r}", "comma-separated integers") from None


# -- commands -------------------------------------------------------------------

def cmd_params(args, out) -> int:
    p = _params(args)
    modes = [Mode(args.mode)] if args.mode else list(Mode)
    header = ["mode", "nbar", "kbar", "u0", "u0_tilde", "alpha", "beta", "B", "overhead", "decimal", "gamma"]
    rows = []
    for mode in modes:
        try:
            d = derive(p, mode)
        except ParameterError as exc:
            if len(modes) == 1:
                raise
            print(f"# {mode.value}: {exc} (constraint: {exc.constraint})", file=out)
            continue
        ratio = d.overhead(p.n)
        rows.append([mode.value, d.nbar, d.kbar, d.u0, d.u0_tilde, d.alpha, d.beta, d.B,
                     f"{p.n * d.alpha}/{d.B}", f"{float(ratio):.4f}", d.repair_bandwidth(p.dbar)])
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    for r in [header] + rows:
        print("  ".join(str(v).rjust(w) for v, w in zip(r, widths)), file=out)
    return EXIT_OK


def cmd_encode(args, out) -> int:
    p = _params(args)
    data = Path(args.input).read_bytes()
    paths = chunks.encode_file(data, Path(args.outdir), args.mode, p, _field(args), args.systematic)
    code = build_code(args.mode, p, _field(args))
    stripes = chunks.StripeCodec(code).stripe_count(len(data))
    print(f"event=encode mode={args.mode} bytes={len(data)} stripes={stripes} "
          f"chunks={len(paths)} alpha={code.alpha} field={code.field.spec}", file=out)
    return EXIT_OK


def cmd_decode(args, out) -> int:
    data = chunks.decode_dir(Path(args.chunkdir))
    Path(args.output).write_bytes(data)
    print(f"event=decode bytes={len(data)}", file=out)
    return EXIT_OK


def cmd_repair(args, out) -> int:
    cs = chunks.load_chunks(Path(args.chunkdir))
    failed = _labels(args.failed, cs.params.u)
    events = chunks.repair_dir(Path(args.chunkdir), failed, _ints(args.helpers))
    for ev in events:
        print(ev.record(), file=out)
    return EXIT_OK


def _pattern_from_args(args, p: CodeParams, rng) -> FailurePattern:
    if args.pattern is not None:
        return FailurePattern.of(_labels(args.pattern, p.u))
    if args.racks is not None:
        if args.racks > p.nbar or args.per_rack > p.u:
            raise ParameterError("pattern does not fit the grid", "racks <= nbar, per-rack <= u")
        return FailurePattern.spread(args.racks, args.per_rack)
    count = args.failures if args.failures is not None else int(rng.integers(1, p.n - p.k + 2))
    if not 0 <= count <= p.n:
        raise ParameterError(f"{count} failures on {p.n} nodes", "0 <= failures <= n")
    return FailurePattern.random(p, count, rng)


def cmd_simulate(args, out) -> int:
    p = _params(args)
    code = build_code(args.mode, p, _field(args))
    rng = np.random.default_rng(args.seed)
    policy = seeded_random(args.seed) if args.policy == "random" else lowest_index
    counts: Counter = Counter()
    total_cross = total_intra = 0
    last_class = None
    for trial in range(args.trials):
        pattern = _pattern_from_args(args, p, rng)
        cluster = Cluster(code, seed=args.seed + trial)
        cls = classify(p, pattern)
        if cls is RepairClass.UNRECOVERABLE:
            report = RepairReport(cls, len(pattern))
        else:
            report = cluster.run_repair(pattern, policy)
            if not cluster.heal_check():
                raise InconsistentDataError(f"trial {trial}: repaired cluster differs from the original")
        for line in report.records():
            print(f"trial={trial} {line}", file=out)
        counts[cls] += 1
        total_cross += report.cross_rack_symbols
        total_intra += report.intra_rack_symbols
        last_class = cls
    print("class          trials", file=out)
    for cls in RepairClass:
        print(f"{cls.value:<14} {counts[cls]:>6}", file=out)
    print(f"total_cross_rack={total_cross} total_intra_rack={total_intra} trials={args.trials}", file=out)
    if args.trials == 1 and last_class is RepairClass.UNRECOVERABLE:
        return EXIT_UNRECOVERABLE
    return EXIT_OK


def cmd_bounds(args, out) -> int:
    n, u, k, l, dbar = args.n, args.u, args.k, args.l, args.dbar
    valid = True
    try:
        p = CodeParams(n, u, k, l, dbar)
    except ParameterError as exc:
        if not args.general:
            raise
        valid = False
        print(f"# {exc} (constraint: {exc.constraint}); general bound only", file=out)
    small = valid and n // u <= FLOWGRAPH_MAX_NBAR and u <= FLOWGRAPH_MAX_U
    print("alpha  beta  bound  mincut", file=out)
    for alpha in range(1, args.alpha_max + 1):
        for beta in range(1, args.beta_max + 1):
            bound = general_cutset_bound(n, u, k, l, dbar, alpha, beta)
            cut = flowgraph_mincut(p, alpha, beta) if small else "-"
            print(f"{alpha:>5} {beta:>5} {bound:>6} {cut:>7}", file=out)
    if valid:
        for mode in Mode:
            try:
                d = derive(p, mode)
            except ParameterError:
                continue
            bound = general_cutset_bound(n, u, k, l, dbar, d.alpha, max(d.beta, 1))
            print(f"point={mode.value} alpha={d.alpha} beta={d.beta} B={d.B} bound={bound} "
                  f"equal={'yes' if bound == d.B else 'no'}", file=out)
    return EXIT_OK


# -- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rackcodes", description="Rack-aware regenerating codes.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("params", help="derived parameters, overhead and repair bandwidth")
    _add_code_args(sp, mode_default=None)
    sp.add_argument("--mode", choices=[m.value for m in Mode], help="one mode (default: both)")
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("encode", help="stripe a file into n chunk files")
    _add_code_args(sp)
    sp.add_argument("input")
    sp.add_argument("outdir")
    sp.add_argument("--systematic", action=argparse.BooleanOptionalAction, default=True)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("decode", help="rebuild a file from surviving chunks")
    sp.add_argument("chunkdir")
    sp.add_argument("output")
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("repair", help="regenerate failed or missing chunk files")
    sp.add_argument("chunkdir")
    sp.add_argument("--failed", help="nodes to treat as failed, e.g. 0.0,2.1 (default: missing files)")
    sp.add_argument("--helpers", help="helper racks, e.g. 1,2 (default: lowest-index complete racks)")
    sp.set_defaults(func=cmd_repair)

    sp = sub.add_parser("simulate", help="failure injection and repair accounting")
    _add_code_args(sp)
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--pattern", help="failed nodes, e.g. 0.0,0.1,3.2")
    src.add_argument("--racks", type=int, help="fail nodes 0..per-rack-1 in racks 0..racks-1")
    src.add_argument("--failures", type=int, help="random failures per trial")
    sp.add_argument("--per-rack", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--policy", choices=["lowest", "random"], default="lowest")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("bounds", help="cut-set bound sweep over (alpha, beta)")
    _add_code_args(sp, mode_default=None)
    sp.add_argument("--alpha-max", type=int, default=3)
    sp.add_argument("--beta-max", type=int, default=3)
    sp.add_argument("--general", action="store_true", help="allow dbar >= kbar (bound formula only)")
    sp.set_defaults(func=cmd_bounds)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ParameterError as exc:
        print(f"error: {exc} (constraint: {exc.constraint})", file=sys.stderr)
        return EXIT_PARAM
    except (UnrecoverableError, InsufficientDataError, InconsistentDataError) as exc:
        print(f"error: class=unrecoverable {exc}", file=sys.stderr)
        return EXIT_UNRECOVERABLE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
