"""Command line entry point: ``cssmaxsat <command> ...``.

Codes are named either by a matrix-text file path or ``family:d``
(``toric:5``, ``rotated-surface:3``, ``color-666:7``).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import codes, encoder, fitting, harness, wcnf
from .decoder import decode_sector
from .errors import CssMaxsatError
from .noise import depolarizing_for_code, load_noise
from .solver import ENGINES, SolverBudget


def resolve_code(spec: str) -> codes.CssCode:
    if Path(spec).is_file():
        return codes.load_code(spec)
    family, sep, d = spec.partition(":")
    if not sep:
        raise CssMaxsatError(f"{spec!r} is neither a file nor family:d")
    return codes.generate(family, int(d))


def _read_bits(text: str) -> np.ndarray:
    chars = [c for c in text if c in "01"]
    return np.array([int(c) for c in chars], dtype=np.uint8)


def _sector(code, noise, sector):
    if sector == "x":
        return code.hz, noise.p_flip, noise.qz
    return code.hx, noise.p_phase, noise.qx


def _noise(args, code):
    if getattr(args, "noise", None):
        return load_noise(args.noise, code)
    return depolarizing_for_code(code, args.p, args.q)


def cmd_code(args):
    if args.action == "gen":
        code = codes.generate(args.family, args.d)
        if args.output:
            codes.save_code(code, args.output)
        else:
            sys.stdout.write(codes.dumps_code(code))
        return 0
    code = resolve_code(args.code)
    if args.action == "validate":
        report = codes.validate_css(code)
        for name, ok in report.checks.items():
            print(f"{'PASS' if ok else 'FAIL'} {name}")
        return 0 if report.ok else 1
    info = {
        "name": code.name,
        "n": code.n,
        "k": code.k,
        "d": code.d,
        "m_x": code.hx.num_rows,
        "m_z": code.hz.num_rows,
        "rank_hx": code.hx.rank,
        "rank_hz": code.hz.rank,
        "hx_weights": sorted(set(code.hx.row_weights())),
        "hz_weights": sorted(set(code.hz.row_weights())),
    }
    print(json.dumps(info, indent=2))
    return 0


def cmd_encode(args):
    code = resolve_code(args.code)
    noise = _noise(args, code)
    h, priors, meas = _sector(code, noise, args.sector)
    s = _read_bits(Path(args.syndrome).read_text()) if args.syndrome else np.zeros(h.num_rows * args.L, np.uint8)
    options = encoder.EncoderOptions(strict3=args.strict3 == "on")
    formula = encoder.build_spacetime_wcnf(h, s, priors, meas, args.L, options)
    if args.scale:
        formula = encoder.quantize_weights(formula, args.scale)
    text = wcnf.dumps(formula, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_decode(args):
    code = resolve_code(args.code)
    noise = _noise(args, code)
    h, priors, meas = _sector(code, noise, args.sector)
    s = _read_bits(Path(args.syndrome).read_text())
    result = decode_sector(
        h,
        s,
        priors,
        args.L,
        meas,
        args.engine,
        encoder.EncoderOptions(strict3=args.strict3 == "on"),
        SolverBudget(seconds=args.time_limit),
        args.solver_cmd,
    )
    print(
        json.dumps(
            {
                "e_dec": "".join(str(int(b)) for b in result.e_dec),
                "r_dec": "".join(str(int(b)) for b in result.r_dec.reshape(-1)),
                "objective": result.objective,
                "status": result.status.value,
                "seconds": result.seconds,
            }
        )
    )
    return 0


def cmd_mc(args):
    config = harness.ExperimentConfig.load(args.config)
    for name in ("seed", "trials", "engine", "solver_cmd", "output", "workers"):
        value = getattr(args, name)
        if value is not None:
            setattr(config, name, value)
    if args.strict3 is not None:
        config.strict3 = args.strict3 == "on"
    records = harness.mc_sweep(config)
    for r in records:
        print(f"{r.code} d={r.d} p={r.p:g} q={r.q:g} L={r.L}: p_L={r.p_L:.5f} [{r.ci_low:.5f}, {r.ci_high:.5f}] ({r.failures}/{r.trials})")
    return 0


def cmd_density(args):
    code = resolve_code(args.code)
    h = code.hz if args.sector == "x" else code.hx
    report = encoder.clause_density(h, args.mode, args.L, encoder.EncoderOptions(strict3=args.strict3 == "on"))
    out = dataclasses.asdict(report)
    out["easy_phase"] = report.easy_phase
    print(json.dumps(out, indent=2))
    return 0


def cmd_fit(args):
    records = harness.load_records(args.records)
    curves = harness.curves_by_distance(records)
    if args.kind == "collapse":
        fit = fitting.fit_collapse(curves, p_th_guess=args.p_guess, window=args.window)
        print(json.dumps(dataclasses.asdict(fit)))
        return 0
    out = {}
    for d, (p, y) in curves.items():
        keep = y > 0
        fit = fitting.fit_heuristic(p[keep], y[keep])
        row = dataclasses.asdict(fit)
        if args.kind == "pth":
            k = next(r.k for r in records if r.d == d)
            row["pseudo_threshold"] = fitting.pseudo_threshold(fit, k)
        out[str(d)] = row
    print(json.dumps(out, indent=2))
    return 0


def cmd_export(args):
    harness.export(harness.load_records(args.records), args.output, args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cssmaxsat", description="MaxSAT decoding of CSS codes")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_code = sub.add_parser("code", help="generate, validate or describe codes")
    code_sub = p_code.add_subparsers(dest="action", required=True)
    g = code_sub.add_parser("gen")
    g.add_argument("family", choices=sorted(codes.GENERATORS))
    g.add_argument("d", type=int)
    g.add_argument("-o", "--output")
    for action in ("validate", "info"):
        a = code_sub.add_parser(action)
        a.add_argument("code")
    p_code.set_defaults(func=cmd_code)

    def noise_args(p):
        p.add_argument("code")
        p.add_argument("--p", type=float, default=0.1)
        p.add_argument("--q", type=float, default=0.0)
        p.add_argument("--noise", help="JSON noise specification")
        p.add_argument("--sector", choices=("x", "z"), default="x", help="x decodes bit flips with Hz")
        p.add_argument("--L", type=int, default=1)
        p.add_argument("--strict3", choices=("on", "off"), default="on")

    e = sub.add_parser("encode", help="emit the WCNF of one decoding instance")
    noise_args(e)
    e.add_argument("--syndrome", help="file with the syndrome (or L*m differences) as 0/1 characters")
    e.add_argument("--format", choices=wcnf.DIALECTS, default="wcnf")
    e.add_argument("--scale", type=int, default=None, help="quantize weights by this factor")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_encode)

    dcd = sub.add_parser("decode", help="decode one syndrome read from a file")
    noise_args(dcd)
    dcd.add_argument("--syndrome", required=True)
    dcd.add_argument("--engine", choices=ENGINES, default="embedded")
    dcd.add_argument("--solver-cmd")
    dcd.add_argument("--time-limit", type=float)
    dcd.set_defaults(func=cmd_decode)

    mc = sub.add_parser("mc", help="Monte-Carlo sweep from a JSON config")
    mc.add_argument("config")
    mc.add_argument("--seed", type=int)
    mc.add_argument("--trials", type=int)
    mc.add_argument("--engine", choices=harness.HARNESS_ENGINES)
    mc.add_argument("--solver-cmd")
    mc.add_argument("--output")
    mc.add_argument("--workers", type=int)
    mc.add_argument("--strict3", choices=("on", "off"))
    mc.set_defaults(func=cmd_mc)

    den = sub.add_parser("density", help="clause density of a code's MaxSAT instances")
    den.add_argument("code")
    den.add_argument("--L", type=int, default=1)
    den.add_argument("--mode", choices=encoder.MODES, default="actual")
    den.add_argument("--sector", choices=("x", "z"), default="x")
    den.add_argument("--strict3", choices=("on", "off"), default="on")
    den.set_defaults(func=cmd_density)

    fit = sub.add_parser("fit", help="fit records from a sweep")
    fit.add_argument("kind", choices=("heuristic", "pth", "collapse"))
    fit.add_argument("records")
    fit.add_argument("--p-guess", type=float)
    fit.add_argument("--window", type=float)
    fit.set_defaults(func=cmd_fit)

    exp = sub.add_parser("export", help="convert sweep records")
    exp.add_argument("records")
    exp.add_argument("-o", "--output", required=True)
    exp.add_argument("--format", choices=("jsonl", "csv"), default="csv")
    exp.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CssMaxsatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
