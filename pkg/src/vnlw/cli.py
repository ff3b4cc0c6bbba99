"""Command-line interface.

Subcommands mirror the experiment drivers; every command prints a JSON
document to stdout and optionally writes report files under ``--out``.
A key=value config file (see :mod:`vnlw.config`) overrides defaults such
as the dominance margin, quadrature order, lattice caps and seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import harness
from .config import DEFAULT, RunConfig, load_config
from .data import BoxSpec, build_adversarial, build_sigma, perturbation_distance, zero_sum_tuple_count
from .errors import VnlwError
from .estimates import big_i_sum, exact_time_integral, g_s, thresholds, xi1_closed_form, xi1_field
from .regimes import check_ledger, plan_ck_failure, plan_long_time, plan_short_time
from .spectral import FrequencyLattice, hs_norm


def _dump(payload) -> None:
    print(json.dumps(harness._jsonable(payload), sort_keys=True, indent=1))


def _parse_n_list(text: str) -> list[int]:
    return [int(chunk) for chunk in text.split(",") if chunk]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file overriding defaults")
    parser.add_argument("--seed", type=int, help="override the configured seed")
    parser.add_argument("--out", help="write the report to this path stem")
    parser.add_argument("--format", default="json", choices=("json", "csv", "both"))


def _resolve_config(args) -> RunConfig:
    config = load_config(args.config) if getattr(args, "config", None) else DEFAULT
    if getattr(args, "seed", None) is not None:
        config = config.replace(seed=args.seed)
    return config


def _emit(report, args) -> None:
    _dump(report.as_dict())
    if args.out:
        written = harness.emit_report(report, args.format, args.out)
        print("\n".join(f"wrote {p}" for p in written), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vnlw", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", help="regularity thresholds for (d, k)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("plan", help="parameter planners with inequality ledgers")
    p.add_argument("regime", choices=("short", "long", "ck"))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=Fraction, required=True)
    p.add_argument("--sigma", type=Fraction)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--margin", type=float)
    _add_common(p)

    p = sub.add_parser("data", help="adversarial data diagnostics")
    p.add_argument("action", choices=("describe",))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--A", type=float, default=1.0)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--variant", default="parity", choices=("parity", "four_point"))
    p.add_argument("--s", type=float, default=-0.75)
    _add_common(p)

    p = sub.add_parser("xi1", help="closed-form first Picard iterate of box data")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--A", type=float, default=1.0)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--s", type=float, default=-0.75)
    p.add_argument("--variant", default="parity", choices=("parity", "four_point"))
    p.add_argument("--xi", help="comma-separated frequency; omit for the H^s norm of the field")
    _add_common(p)

    p = sub.add_parser("inflate", help="norm-inflation experiments")
    p.add_argument("regime", choices=("short", "long"))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--sigma", type=float)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--N", help="single N (long) or comma list (short)")
    p.add_argument("--A", type=float, default=16.0)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--margin", type=float)
    _add_common(p)

    p = sub.add_parser("ck-failure", help="growth of the first iterate at unit data size")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--N", required=True, help="comma-separated sweep, e.g. 64,128,256,512")
    _add_common(p)

    p = sub.add_parser("wp", help="contraction solver plus smoothing checks")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--scale", type=float, default=0.02)
    p.add_argument("--T", type=float, default=0.25)
    _add_common(p)

    p = sub.add_parser("estimates", help="closed-form building blocks")
    est = p.add_subparsers(dest="estimate", required=True)
    q = est.add_parser("gs")
    q.add_argument("--s", type=float, required=True)
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--A", type=float, required=True)
    _add_common(q)
    q = est.add_parser("time-integral")
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--b", type=float, required=True)
    q.add_argument("--c", type=float, required=True)
    q.add_argument("--t", type=float, required=True)
    _add_common(q)
    q = est.add_parser("bigi")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--N", type=int, required=True)
    _add_common(q)

    p = sub.add_parser("verify", help="deterministic invariant suite")
    _add_common(p)

    return parser


def _cmd_thresholds(args, config) -> None:
    th = thresholds(args.d, args.k)
    _dump(
        {
            "inputs": {"d": args.d, "k": args.k},
            "exact": {"s_scal": str(th.s_scal), "s_vis": str(th.s_vis), "s_M": str(th.s_M)},
            "value": th.as_floats(),
        }
    )


def _cmd_plan(args, config) -> None:
    margin = args.margin if args.margin is not None else config.margin
    if args.regime == "short":
        plan = plan_short_time(args.d, args.k, args.s, args.n, args.N, config=config)
    elif args.regime == "long":
        sigma = args.sigma if args.sigma is not None else args.s
        plan = plan_long_time(args.d, args.k, args.s, sigma, args.n, args.N, config=config)
    else:
        plan = plan_ck_failure(args.d, args.k, args.s, args.N, config=config)
    report = check_ledger(plan, margin)
    payload = plan.as_dict()
    payload["ledger_check"] = {
        "margin": report.margin,
        "pass": report.passed,
        "binding": report.binding,
    }
    _dump(payload)


def _cmd_data(args, config) -> None:
    spec = BoxSpec(N=args.N, A=args.A, variant=args.variant, k=args.k, d=args.d)
    lattice = FrequencyLattice(args.d, spec.max_frequency + 1)
    data = build_adversarial(spec, args.R, lattice)
    exact, predicted = perturbation_distance(data, args.s)
    _dump(
        {
            "sigma": [list(eta) for eta in spec.sigma],
            "support_count": data.support_count,
            "fl01_norm": data.fl01_norm(),
            "hs_norm": {"s": args.s, "value": exact},
            "predicted_RNsAd2": predicted,
            "zero_sum_tuples": zero_sum_tuple_count(spec.sigma, args.k),
        }
    )


def _cmd_xi1(args, config) -> None:
    spec = BoxSpec(N=args.N, A=args.A, variant=args.variant, k=args.k, d=args.d)
    lattice = FrequencyLattice(args.d, spec.max_frequency + 1)
    data = build_adversarial(spec, args.R, lattice)
    if args.xi is not None:
        xi = tuple(int(c) for c in args.xi.split(","))
        value = xi1_closed_form(data, args.t, xi, config=config)
        _dump({"t": args.t, "xi": list(xi), "re": value.real, "im": value.imag})
    else:
        f = xi1_field(data, args.t, config=config)
        _dump({"t": args.t, "hs_norm": {"s": args.s, "value": hs_norm(f, args.s)}})


def _cmd_inflate(args, config) -> None:
    if args.regime == "short":
        sweep = _parse_n_list(args.N) if args.N else [256]
        report = harness.run_short_time_inflation(
            args.d, args.k, args.s, sweep, A=args.A, R=args.R, config=config, seed=config.seed
        )
    else:
        sigma = args.sigma if args.sigma is not None else args.s
        N = int(args.N) if args.N else None
        kwargs = {"config": config, "seed": config.seed}
        if args.margin is not None:
            kwargs["margin"] = args.margin
        report = harness.run_long_time_inflation(
            args.d, args.k, args.s, sigma, args.n, N, **kwargs
        )
    _emit(report, args)


def _cmd_ck(args, config) -> None:
    report = harness.run_ck_failure(
        args.d, args.k, args.s, _parse_n_list(args.N), config=config, seed=config.seed
    )
    _emit(report, args)


def _cmd_wp(args, config) -> None:
    report = harness.run_wellposedness(
        args.d, args.k, args.s, data_scale=args.scale, T=args.T, config=config, seed=config.seed
    )
    _emit(report, args)


def _cmd_estimates(args, config) -> None:
    if args.estimate == "gs":
        value = g_s(args.s, args.d, args.A)
        _dump({"inputs": {"s": args.s, "d": args.d, "A": args.A}, "value": value, "pass": True})
    elif args.estimate == "time-integral":
        value = exact_time_integral(args.a, args.b, args.c, args.t)
        _dump(
            {
                "inputs": {"a": args.a, "b": args.b, "c": args.c, "t": args.t},
                "value": value,
                "pass": math.isfinite(value),
            }
        )
    else:
        sigma = build_sigma(args.k, args.N, "parity", 1)
        values = []
        for combo in harness._zero_sum_tuples(sigma, args.k):
            values.append(args.N * big_i_sum(list(combo)))
        bracket = {"min": min(values), "max": max(values), "ratio": max(values) / min(values)}
        _dump(
            {
                "inputs": {"k": args.k, "N": args.N},
                "value": values,
                "bracket": bracket,
                "pass": bracket["ratio"] <= 10.0,
            }
        )


def _cmd_verify(args, config) -> None:
    text = harness.verify_json(config)
    print(text)
    if args.out:
        target = args.out if args.out.endswith(".json") else args.out + ".json"
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {target}", file=sys.stderr)


_DISPATCH = {
    "thresholds": _cmd_thresholds,
    "plan": _cmd_plan,
    "data": _cmd_data,
    "xi1": _cmd_xi1,
    "inflate": _cmd_inflate,
    "ck-failure": _cmd_ck,
    "wp": _cmd_wp,
    "estimates": _cmd_estimates,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _resolve_config(args)
    try:
        _DISPATCH[args.command](args, config)
    except VnlwError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
