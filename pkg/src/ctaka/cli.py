"""``ctaka`` command line: run one scenario, the full matrix, or the toy-curve oracle."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .curve_math import TOY, enumerate_curve, hasse_interval, scalar_mul
from .errors import ConfigError
from .harness import PROTOCOLS, SCENARIOS, ScenarioConfig, emit_transcript, expectation_met, run_scenario

MATRIX_CELLS = [("cui", "honest"), ("cui", "koa"), ("cui", "bia"), ("cui", "mma"), ("deng", "honest"), ("deng", "koa")]


def matrix_configs(seed: int = 1, profiles=("toy", "standard")) -> list[ScenarioConfig]:
    return [
        ScenarioConfig(protocol, scenario, profile, seed, confirm=confirm)
        for profile in profiles
        for protocol, scenario in MATRIX_CELLS
        for confirm in (False, True)
    ]


def _hex_int(s: str) -> int:
    return int(s, 16)


def cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = ScenarioConfig(
            protocol=args.protocol,
            scenario=args.scenario,
            profile=args.profile,
            seed=args.seed,
            alpha=args.alpha,
            confirm=args.confirm,
            identities=tuple(args.id) if args.id else ("alice", "bob"),
        )
    except ConfigError as e:
        print(f"ctaka: {e}", file=sys.stderr)
        return 2
    transcript, verdict = run_scenario(cfg)
    data = emit_transcript(transcript, args.format)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return 0 if expectation_met(cfg, verdict) else 1


def cmd_matrix(args: argparse.Namespace) -> int:
    profiles = tuple(args.profile) if args.profile else ("toy", "standard")
    header = f"{'protocol':<8} {'scenario':<8} {'profile':<9} {'confirm':<7} {'keys_match':<10} {'attack':<6} {'detected':<8} ok"
    print(header)
    print("-" * len(header))
    failures = 0
    for cfg in matrix_configs(args.seed, profiles):
        _, v = run_scenario(cfg)
        ok = expectation_met(cfg, v)
        failures += not ok
        print(
            f"{cfg.protocol:<8} {cfg.scenario:<8} {cfg.profile:<9} {('on' if cfg.confirm else 'off'):<7} "
            f"{str(v.keys_match).lower():<10} {str(v.attack_success).lower():<6} "
            f"{str(v.confirmation_detected).lower():<8} {'PASS' if ok else 'FAIL'}"
        )
    print(f"{failures} unexpected verdict(s)")
    return 0 if failures == 0 else 1


def cmd_oracle(args: argparse.Namespace) -> int:
    curve = TOY
    order, points = enumerate_curve(curve)
    lo, hi = hasse_interval(curve.p)
    checks = {
        "hasse": lo <= order <= hi,
        "cofactor_one": order == curve.n,
        "n_times_G_is_identity": scalar_mul(curve.n, curve.G, curve).is_identity,
        "order_times_G_is_identity": scalar_mul(order, curve.G, curve).is_identity,
        "generator_is_first_point": points[1] == curve.G,
    }
    print(f"curve: y^2 = x^3 + {curve.a}x + {curve.b} over GF({curve.p})")
    print(f"group order: {order} (Hasse interval [{lo}, {hi}])")
    print(f"generator: ({curve.G.x}, {curve.G.y}), order n = {curve.n}, cofactor = {order // curve.n}")
    for name, ok in checks.items():
        print(f"{name}: {'ok' if ok else 'FAILED'}")
    return 0 if all(checks.values()) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctaka", description="certificateless key agreement attack lab")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and emit its transcript")
    run.add_argument("--protocol", choices=PROTOCOLS, required=True)
    run.add_argument("--scenario", choices=SCENARIOS, required=True)
    run.add_argument("--profile", choices=("toy", "standard"), default="toy")
    run.add_argument("--seed", type=int, default=1)
    run.add_argument("--alpha", type=_hex_int, help="key offset multiplier, hex")
    run.add_argument("--confirm", action="store_true", help="enable key confirmation")
    run.add_argument("--format", choices=("json", "text"), default="json")
    run.add_argument("--out", help="write transcript here instead of stdout")
    run.add_argument("--id", action="append", help="party identity (give twice: initiator, responder)")
    run.set_defaults(func=cmd_run)

    matrix = sub.add_parser("matrix", help="run every scenario cell and print a verdict table")
    matrix.add_argument("--seed", type=int, default=1)
    matrix.add_argument("--profile", action="append", choices=("toy", "standard"))
    matrix.set_defaults(func=cmd_matrix)

    oracle = sub.add_parser("oracle", help="enumerate the toy curve and check the generator")
    oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
