"""Command-line entry point.

Exit status: 0 on success, 1 when a validation fails, 2 on usage errors
(bad flags, malformed arguments or input files). The default seed comes from
the ``AZTEC_SEED`` environment variable, else 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import io as aio
from .rng import GENERATOR_ID

SEED_ENV = "AZTEC_SEED"


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip() != "")
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _two_line(text: str, n: int):
    from .kernels import TwoLineState
    if ";" not in text:
        raise UsageError(f"two-line state must look like 'x1,x2;y1', got {text!r}")
    xs, ys = text.split(";", 1)
    x, y = _ints(xs), _ints(ys)
    if len(y) != n or len(x) != n + 1:
        raise UsageError(f"state {text!r} does not have n={n} lower and n+1 upper coordinates")
    try:
        return TwoLineState(x, y)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _line(text: str, n: int) -> tuple[int, ...]:
    if ";" in text:
        raise UsageError(f"expected a single line like '1,2', got {text!r}")
    v = _ints(text)
    if len(v) != n:
        raise UsageError(f"line {text!r} does not have n={n} coordinates")
    if any(a >= b for a, b in zip(v, v[1:])):
        raise UsageError(f"line {text!r} is not strictly increasing")
    return v


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _format_fraction(v: Fraction) -> str:
    return f"{v} ({float(v):.12g})"


def cmd_sample(args) -> int:
    from .render import render_ascii, render_svg
    from .shuffling import grow
    if args.order < 0:
        raise UsageError("--order must be nonnegative")
    tiling = grow(args.order, args.seed)
    meta = f"order={args.order} seed={args.seed} generator={GENERATOR_ID}"
    if args.format == "json":
        text = aio.dump_tiling(tiling, seed=args.seed, generator_id=GENERATOR_ID)
    elif args.format == "svg":
        text = render_svg(tiling, particles=args.particles, cell=args.cell, comment=meta)
    else:
        text = f"# {meta}\n" + render_ascii(tiling)
    _write(text, args.output)
    return 0


def cmd_render(args) -> int:
    from .render import render_ascii, render_svg
    try:
        with open(args.input, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from None
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise UsageError(f"{args.input}: not valid JSON: {exc}") from None
    try:
        tiling = aio.tiling_from_dict(doc if isinstance(doc, dict) else {})
    except aio.ParseError as exc:
        raise UsageError(f"{args.input}: {exc}") from None
    meta = f"order={tiling.order} seed={doc.get('seed')} generator={doc.get('generator_id')}"
    if args.format == "svg":
        text = render_svg(tiling, particles=args.particles, cell=args.cell, comment=meta)
    else:
        text = f"# {meta}\n" + render_ascii(tiling)
    _write(text, args.output)
    return 0


def cmd_evolve(args) -> int:
    import numpy as np
    from .dynamics import simulate_batch
    if args.lines < 1 or args.steps < 0 or args.trials < 1:
        raise UsageError("need --lines >= 1, --steps >= 0, --trials >= 1")
    config = {"lines": args.lines, "steps": args.steps, "trials": args.trials}
    if args.record_json:
        docs = [aio.dump_trajectory(aio.record_trajectory(args.lines, args.steps, args.seed, trial=k, **config))
                for k in range(args.trials)]
        _write("".join(docs), args.record_json)
    final = simulate_batch(args.lines, args.steps, args.trials, args.seed, record=[args.steps])[args.steps]
    out = {"seed": args.seed, "generator_id": GENERATOR_ID, **config}
    if args.trials == 1:
        row = final[0].tolist()
        out["final"] = [row[j * (j - 1) // 2: j * (j + 1) // 2] for j in range(1, args.lines + 1)]
    else:
        out["mean_final"] = np.round(final.mean(axis=0), 6).tolist()
    sys.stdout.write(json.dumps(out, sort_keys=True) + "\n")
    return 0


def cmd_kernel(args) -> int:
    from . import kernels
    if args.n < 1 or args.t < 0:
        raise UsageError("need --n >= 1 and --t >= 0")
    if args.kind in ("q", "qplus"):
        src, dst = _two_line(args.source, args.n), _two_line(args.target, args.n)
        fn = kernels.q if args.kind == "q" else kernels.q_plus
        value = fn(args.t, src, dst)
    else:
        src, dst = _line(args.source, args.n), _line(args.target, args.n)
        fn = kernels.p if args.kind == "p" else kernels.p_plus
        value = fn(args.t, src, dst)
    sys.stdout.write(_format_fraction(value) + "\n")
    return 0


def _emit(reports, output: str | None) -> int:
    text = "".join(aio.dump_report(r) for r in reports)
    _write(text, output)
    for r in reports:
        sys.stderr.write(r.summary() + "\n")
    return 0 if all(r.passed for r in reports) else 1


def cmd_validate(args) -> int:
    from . import asymptotics as asy
    reports = []
    if args.suite == "kernels":
        from .validation import check_killed_dynamics, check_top_lines, kernel_identity_suite, suite_report
        if not 1 <= args.n <= 3 or not 0 <= args.t <= 4:
            raise UsageError("kernel identities are checked for 1 <= n <= 3 and 0 <= t <= 4")
        checks = kernel_identity_suite(args.n, args.t)
        if args.n <= 2:
            for s in range(1, min(args.t, 2) + 1):
                checks += [check_killed_dynamics(args.n, s), check_top_lines(args.n, s)]
        reports.append(suite_report(checks, n=args.n, t=args.t))
    elif args.suite == "gue":
        from .dynamics import simulate_batch
        reports.append(asy.gue_limit_report(args.dim, args.t, args.trials, args.seed, args.gue_samples,
                                            args.threshold, args.centring))
        if args.t >= 1:
            X = simulate_batch(args.dim, args.t, args.trials, args.seed, record=[args.t])[args.t]
            reports.append(asy.conditional_uniformity_report(X, args.dim, args.seed, significance=args.significance))
    elif args.suite == "dyson":
        top = _ints(args.top) if args.top else tuple(1 + 2 * i for i in range(args.k))
        if len(top) != args.k or any(a >= b for a, b in zip(top, top[1:])):
            raise UsageError("--top must be a strictly increasing line with k entries")
        reports.append(asy.dyson_transition_report(top, args.trials, args.seed, args.steps, args.significance))
        if args.limit_N:
            reports.append(asy.dyson_limit_report(args.k, (1.0,), _ints(args.limit_N), args.limit_trials, args.seed))
    elif args.suite == "entrance":
        N_list = _ints(args.N)
        try:
            reports.append(asy.kernel_convergence_report(args.n, args.t, None, N_list, args.mode,
                                                         ceiling=args.ceiling))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return _emit(reports, args.output)


def cmd_gue(args) -> int:
    from .asymptotics import gue_minor_samples
    if args.dim < 1 or args.samples < 1:
        raise UsageError("need --dim >= 1 and --samples >= 1")
    ev = gue_minor_samples(args.dim, args.samples, args.seed)
    lines = []
    for k in range(args.samples):
        minors = [[float(v) for v in ev[j][k]] for j in range(args.dim)]
        lines.append(json.dumps({"seed": args.seed, "index": k, "dim": args.dim, "minors": minors}) + "\n")
    _write("".join(lines), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    seed_help = f"random seed (default: ${SEED_ENV} or 0)"
    ap = argparse.ArgumentParser(prog="aztec", description="Aztec diamond tilings and interlaced particles.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", help="sample a uniform tiling by shuffling")
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--seed", type=int, default=None, help=seed_help)
    sp.add_argument("--format", choices=["svg", "ascii", "json"], default="svg")
    sp.add_argument("--particles", action="store_true", help="mark particles in the SVG")
    sp.add_argument("--cell", type=int, default=8, help="SVG pixels per unit square")
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("render", help="draw a tiling stored as JSON")
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--format", choices=["svg", "ascii"], default="svg")
    sp.add_argument("--particles", action="store_true")
    sp.add_argument("--cell", type=int, default=8)
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("evolve", help="run the interlaced particle dynamics")
    sp.add_argument("--lines", type=int, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--seed", type=int, default=None, help=seed_help)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--record-json", help="write one trajectory document per trial (JSON lines)")
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("kernel", help="evaluate a transition kernel exactly")
    sp.add_argument("kind", choices=["q", "qplus", "p", "pplus"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--from", dest="source", required=True, help="'x1,...;y1,...' (q, qplus) or 'y1,...' (p, pplus)")
    sp.add_argument("--to", dest="target", required=True)
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("validate", help="run a validation suite and emit JSON reports")
    sp.add_argument("suite", choices=["kernels", "gue", "dyson", "entrance"])
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--t", type=float, default=None)
    sp.add_argument("--dim", type=int, default=3)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--top", help="top line for the dyson transition test, e.g. '1,3,6'")
    sp.add_argument("--steps", type=int, default=1)
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--gue-samples", type=int, default=100_000)
    sp.add_argument("--centring", choices=["none", "start"], default="none",
                    help="gue: shift each line by its initial centre before rescaling")
    sp.add_argument("--limit-N", help="also compare rescaled lines with the entrance law at these N")
    sp.add_argument("--limit-trials", type=int, default=10_000)
    sp.add_argument("--N", default="64,256,1024")
    sp.add_argument("--mode", choices=["entrance", "transition"], default="entrance")
    sp.add_argument("--threshold", type=float, default=0.05, help="KS threshold")
    sp.add_argument("--significance", type=float, default=1e-3, help="chi-square significance level")
    sp.add_argument("--ceiling", type=float, default=1e-2, help="kernel convergence error ceiling")
    sp.add_argument("--seed", type=int, default=None, help=seed_help)
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("gue", help="dump matrix-minor eigenvalues as JSON lines")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--seed", type=int, default=None, help=seed_help)
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_gue)
    return ap


def _fill_defaults(args) -> None:
    if getattr(args, "seed", "absent") is None:
        args.seed = _default_seed()
    if args.command == "validate":
        if args.t is None:
            args.t = {"kernels": 3, "gue": 400, "entrance": 1.0}.get(args.suite, 1.0)
        if args.suite in ("kernels", "gue"):
            if args.t != int(args.t):
                raise UsageError("--t must be an integer for this suite")
            args.t = int(args.t)
        if args.trials is None:
            args.trials = {"gue": 10_000, "dyson": 100_000}.get(args.suite, 10_000)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    try:
        _fill_defaults(args)
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"aztec: error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
