"""Command line interface.

Exit status: 0 when every check passes, 1 on an invariant violation, 2 on
usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .campaign import MODES, CampaignConfig, run_campaign, summary_json
from .contextuality import chsh_full_value, chsh_value
from .entanglement import f_closed, monogamy_check, threshold_x
from .qlinalg import ValidationError, partial_trace
from .serialization import dumps_strict, read_state

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def _dims(text: str) -> tuple:
    try:
        dA, dB = (int(t) for t in text.lower().split("x"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected DAxDB, got {text!r}") from exc
    return dA, dB


def _local_state(path):
    rho = read_state(path)
    return partial_trace(rho, 0) if rho.is_bipartite else rho


def cmd_chsh_value(args) -> int:
    rho_A = _local_state(args.state)
    p = rho_A.spectrum()
    out = {"p": p.tolist(), "chsh_prime": chsh_value(p), "chsh_full": chsh_full_value(p)}
    print(dumps_strict(out))
    return EXIT_OK


def cmd_bound(args) -> int:
    rho = read_state(args.state)
    rep = monogamy_check(rho, convex_roof=args.convex_roof, seed=args.seed, restarts=args.restarts)
    print(dumps_strict(rep.to_dict()))
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_threshold(args) -> int:
    x = threshold_x()
    print(dumps_strict({"x_star": x, "f_x_star": f_closed(x), "target": 2**0.5 - 1}))
    return EXIT_OK if 2.945 <= x <= 2.955 else EXIT_VIOLATION


def cmd_campaign(args) -> int:
    cfg = CampaignConfig(args.mode, args.dims, args.n, args.seed, args.budget, args.out, args.format)
    res = run_campaign(cfg)
    print(summary_json(res))
    return EXIT_OK if res.passed else EXIT_VIOLATION


def cmd_verify_props(args) -> int:
    status = EXIT_OK
    plan = [
        CampaignConfig("prop1", n=1000, seed=args.seed),
        CampaignConfig("monogamy", (4, 4), n=200, seed=args.seed),
        CampaignConfig("prop3", (4, 4), n=10, seed=args.seed, budget=5),
        CampaignConfig("threshold", seed=args.seed),
    ]
    for cfg in plan:
        res = run_campaign(cfg)
        s = res.summary
        flag = "PASS" if res.passed else "FAIL"
        print(f"{flag} {cfg.mode:<10} samples={s['samples']} failures={s['failures']} "
              f"worst_margin={s['max_violation']:.3e}")
        if not res.passed:
            status = EXIT_VIOLATION
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monogamy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chsh-value", help="CHSH contextuality of a (reduced) four-level state")
    p.add_argument("state")
    p.set_defaults(func=cmd_chsh_value)

    p = sub.add_parser("bound", help="monogamy report for a 4 x d' state")
    p.add_argument("state")
    p.add_argument("--convex-roof", action="store_true", help="also optimize the convex roof")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=20)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("threshold", help="entanglement threshold beyond which CHSH holds locally")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("campaign", help="Monte Carlo verification campaign")
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--dims", type=_dims, default=(4, 4))
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("verify-props", help="quick property suite")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_props)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
