"""Command-line surface.

Subcommands: ``classify``, ``transform``, ``canonicalize``, ``induce``,
``casestudy``, ``simulate``, ``melnikov``, ``verify``.  All reports are
deterministic JSON (sorted keys, 17-significant-digit floats), so repeated
invocations with identical flags and seed are byte-identical.

Exit codes: 0 success, 1 domain error (constraint violation, nonkinetic
input, parse error, ...), 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import jsonio
from .acceptance import CRITERIA, run_suite
from .backend import backend_name
from .classify import classify_system
from .crn import (
    canonicalize,
    induce_kinetics,
    load_network,
    save_network,
    serialize_network,
)
from .dynamics import (
    Section,
    detect_limit_cycle,
    find_fixed_points,
    integrate,
    melnikov_at_zero,
)
from .errors import CrnForgeError
from .homoclinic import CaseStudyParams, build_variant, published_networks
from .poly import PolySystem
from .transform import TransformSpec, apply as apply_transform

_VARIANT_NETWORKS = {
    "xfact": "sec43",
    "sheared_xfact": "appC_sheared",
    "hybrid": "appC_hybrid",
}


def _load_system(path: str) -> PolySystem:
    return PolySystem.from_json_dict(jsonio.load(path))


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _default_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("CRNFORGE_SEED")
    return int(env) if env else 42


def cmd_classify(args) -> int:
    sys_ = _load_system(args.system)
    report = classify_system(sys_)
    payload = report.to_json_dict(sys_.variables)
    payload["variables"] = list(sys_.variables)
    _emit(jsonio.dumps(payload), args.out)
    return 0


def cmd_transform(args) -> int:
    sys_ = _load_system(args.system)
    spec = TransformSpec.from_json_dict(jsonio.load(args.spec))
    result = apply_transform(spec, sys_)
    _emit(jsonio.dumps(result.system.to_json_dict()), args.out)
    if args.show_ledger:
        sys.stderr.write(jsonio.dumps({"ledger": result.ledger}))
    return 0


def cmd_canonicalize(args) -> int:
    sys_ = _load_system(args.system)
    net = canonicalize(sys_)
    _emit(serialize_network(net), args.out)
    return 0


def cmd_induce(args) -> int:
    net = load_network(args.network)
    _emit(jsonio.dumps(induce_kinetics(net).to_json_dict()), args.out)
    return 0


def cmd_casestudy(args) -> int:
    params = CaseStudyParams(
        a=args.a,
        alpha=args.alpha,
        t1=args.t1,
        t2=args.t2,
        t=args.t,
        omega1=args.omega1,
        omega2=args.omega2,
        omega=args.omega,
        mu=args.mu,
    )
    variant = build_variant(params, args.variant)
    os.makedirs(args.out_dir, exist_ok=True)
    prefix = os.path.join(args.out_dir, f"casestudy_{args.variant}")
    jsonio.dump(variant.system.to_json_dict(), prefix + "_system.json")
    jsonio.dump(
        {
            "variant": args.variant,
            "params": params.bundle(),
            "coefficients": variant.coefficients,
            "constraints": [
                {"name": name, "value": value, "holds": holds}
                for name, value, holds in variant.constraints.evaluate(params.bundle())
            ],
        },
        prefix + "_coefficients.json",
    )
    written = [prefix + "_system.json", prefix + "_coefficients.json"]
    if args.variant in _VARIANT_NETWORKS:
        net = published_networks(params, _VARIANT_NETWORKS[args.variant])
        save_network(net, prefix + "_network.txt")
        written.append(prefix + "_network.txt")
    elif args.variant == "qssa":
        net = canonicalize(variant.system)
        save_network(net, prefix + "_network.txt")
        written.append(prefix + "_network.txt")
    else:
        report = classify_system(variant.system)
        jsonio.dump(
            report.to_json_dict(variant.system.variables), prefix + "_classify.json"
        )
        written.append(prefix + "_classify.json")
    for path in written:
        sys.stdout.write(path + "\n")
    return 0


def cmd_simulate(args) -> int:
    sys_ = _load_system(args.system)
    x0 = [float(v) for v in args.x0.split(",")]
    rec = integrate(
        sys_,
        x0,
        (0.0, args.t_end),
        args.rtol,
        args.atol,
        dense=args.samples > 0,
    )
    lines = ["t," + ",".join(sys_.variables)]
    if args.samples > 0 and rec.sol is not None:
        ts = np.linspace(0.0, rec.final_time, args.samples)
        ys = rec.sol(ts)
    else:
        ts, ys = rec.t, rec.y
    for t, row in zip(ts, ys):
        lines.append(
            ",".join(jsonio.format_float(float(v)) for v in [t, *row])
        )
    _emit("\n".join(lines) + "\n", args.out)
    if rec.diverged:
        sys.stderr.write("warning: trajectory diverged; output truncated\n")
    if args.sidecar:
        box = [(min(c.min(), 0.0) - 1.0, c.max() + 1.0) for c in ys.T]
        try:
            points = find_fixed_points(sys_, box)
            payload = {
                "fixed_points": [fp.to_json_dict() for fp in points],
                "degenerate_input": points.degenerate_input,
                "cycles": [],
                "status": rec.status,
            }
        except CrnForgeError as exc:
            payload = {
                "fixed_points": [],
                "cycles": [],
                "error": str(exc),
                "status": rec.status,
            }
        if args.cycle_section:
            ax, ay, dx, dy, seed = (float(v) for v in args.cycle_section.split(","))
            outcome = detect_limit_cycle(
                sys_, Section(anchor=(ax, ay), direction=(dx, dy)), seed=seed
            )
            if outcome.cycle is not None:
                payload["cycles"] = [
                    {
                        "period": outcome.cycle.period,
                        "point": [float(v) for v in outcome.cycle.point],
                        "multiplier": outcome.cycle.multiplier,
                    }
                ]
            payload["cycle_search"] = outcome.reason
        jsonio.dump(payload, args.sidecar)
    return 0


def cmd_melnikov(args) -> int:
    mel = melnikov_at_zero(args.a, f_exponent=args.f_exponent)
    payload = {
        "a": args.a,
        "f_exponent": args.f_exponent,
        "value": mel.value,
        "value_branch_route": mel.value_branch_route,
        "estimated_error": mel.estimated_error,
        "truncation_delta": mel.truncation_delta,
        "h_drift_max": mel.h_drift_max,
        "t_backward": mel.t_backward,
        "t_forward": mel.t_forward,
        "phi_min": float(np.min(mel.phi_samples[:, 1])),
    }
    _emit(jsonio.dumps(payload), args.out)
    return 0


def cmd_verify(args) -> int:
    names = args.suite.split(",") if args.suite else ["all"]
    try:
        results = run_suite(names, seed=_default_seed(args))
    except KeyError as exc:
        sys.stderr.write(f"usage error: {exc.args[0]}\n")
        return 2
    failures = 0
    for result in results:
        sys.stdout.write(result.line() + "\n")
        failures += 0 if result.passed else 1
    sys.stdout.write(
        f"{len(results) - failures}/{len(results)} criteria passed "
        f"(backend: {backend_name()})\n"
    )
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crnforge",
        description="Construct and verify mass-action reaction systems "
        "with prescribed dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="kinetic/nonnegative/x-factorable report")
    p.add_argument("system", help="PolySystem JSON file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("transform", help="apply a transformation pipeline")
    p.add_argument("system", help="PolySystem JSON file")
    p.add_argument("--spec", required=True, help="TransformSpec JSON file")
    p.add_argument("--out", default=None)
    p.add_argument("--show-ledger", action="store_true")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("canonicalize", help="canonical reaction network of a kinetic system")
    p.add_argument("system")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("induce", help="mass-action kinetic equations of a network")
    p.add_argument("network")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_induce)

    p = sub.add_parser("casestudy", help="build a case-study variant")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--variant", required=True,
                   choices=["translated", "xfact", "sheared_xfact", "qssa", "hybrid"])
    p.add_argument("--t1", type=float, default=1.0)
    p.add_argument("--t2", type=float, default=1.5)
    p.add_argument("--t", type=float, default=2.0)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--omega1", type=float, default=1.0)
    p.add_argument("--omega2", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1e-4)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_casestudy)

    p = sub.add_parser("simulate", help="integrate a system and emit a CSV trajectory")
    p.add_argument("system")
    p.add_argument("--x0", required=True, help="comma-separated initial state")
    p.add_argument("--t-end", type=float, required=True, dest="t_end")
    p.add_argument("--rtol", type=float, default=1e-9)
    p.add_argument("--atol", type=float, default=1e-12)
    p.add_argument("--samples", type=int, default=0,
                   help="resample the dense solution at N points (0: accepted steps)")
    p.add_argument("--out", default=None)
    p.add_argument("--sidecar", default=None,
                   help="write fixed points, cycles and run status JSON here")
    p.add_argument("--cycle-section", default=None, dest="cycle_section",
                   help="run a return-map cycle search for the sidecar: "
                        "'anchor_x,anchor_y,dir_x,dir_y,seed_radius'")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("melnikov", help="Melnikov integral of the case-study loop")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--f-exponent", type=int, default=1, dest="f_exponent")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_melnikov)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--suite", default="all",
                   help="comma-separated criteria names or 'all' "
                        f"(available: {', '.join(CRITERIA)})")
    p.add_argument("--seed", type=int, default=None,
                   help="randomized-procedure seed (default: CRNFORGE_SEED or 42)")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CrnForgeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
