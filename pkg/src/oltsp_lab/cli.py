"""Command-line front end: simulate, oracle, gen, batch, adversary.

Exit codes: 0 success / bound pass, 1 bound violation or infeasibility,
2 usage errors (including incompatible policy pairings).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

from . import adversaries as adv_mod
from . import algorithms as alg_mod
from .engine import SimulationError, outcome_to_text, simulate, verify_outcome
from .instance import (
    CLOSED,
    COUNT_KNOWN,
    GenParams,
    Instance,
    LOCATIONS_KNOWN,
    OPEN,
    decode,
    encode,
    generate_random,
    validate_instance,
)
from .metric import EPS
from .oracle import DP_CAP, opt_makespan

USAGE_ERROR = 2
BOUND_ERROR = 1


def _num(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class BatchRow:
    seed: int
    policy: str
    alg: float
    opt: float
    ratio: float


def report(rows: Sequence[BatchRow], fmt: str, bound: Optional[float],
           params: Optional[dict] = None) -> str:
    max_ratio = max((r.ratio for r in rows), default=0.0)
    mean_ratio = sum(r.ratio for r in rows) / len(rows) if rows else 0.0
    passed = bound is None or max_ratio <= bound + EPS
    if fmt == "json":
        doc = {
            "params": params or {},
            "rows": [
                {
                    "id": r.seed,
                    "policy": r.policy,
                    "alg": float(_num(r.alg)),
                    "opt": float(_num(r.opt)),
                    "ratio": float(_num(r.ratio)),
                }
                for r in rows
            ],
            "summary": {
                "max_ratio": float(_num(max_ratio)),
                "mean_ratio": float(_num(mean_ratio)),
                "bound": bound,
                "pass": passed,
            },
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = []
    if params:
        pairs = " ".join(f"{k}={v}" for k, v in params.items())
        lines.append(f"# {pairs}")
    lines.append("id,policy,alg,opt,ratio")
    for r in rows:
        lines.append(f"{r.seed},{r.policy},{_num(r.alg)},{_num(r.opt)},{_num(r.ratio)}")
    summary = (
        f"# summary max_ratio={_num(max_ratio)} mean_ratio={_num(mean_ratio)} "
        f"bound={_num(bound) if bound is not None else 'none'} "
        f"result={'pass' if passed else 'fail'}"
    )
    lines.append(summary)
    return "\n".join(lines) + "\n"


def _check_pairing(policy, inst_kind: str, variant: str, knowledge: str) -> Optional[str]:
    req_kind = getattr(policy, "requires_kind", None)
    req_variant = getattr(policy, "requires_variant", None)
    if req_kind and req_kind != inst_kind:
        return f"policy {policy.name!r} requires a {req_kind} space, got {inst_kind}"
    if req_variant and req_variant != variant:
        return f"policy {policy.name!r} requires the {req_variant} variant, got {variant}"
    if policy.needs_locations and knowledge == COUNT_KNOWN:
        return (
            f"policy {policy.name!r} needs known locations but the scenario "
            "reveals only the request count"
        )
    return None


def _cmd_simulate(args) -> int:
    with open(args.instance, "r", encoding="utf-8") as fh:
        inst = decode(fh.read())
    issues = validate_instance(inst)
    if issues:
        print("invalid instance: " + "; ".join(issues), file=sys.stderr)
        return BOUND_ERROR
    policy = alg_mod.make_policy(args.policy)
    msg = _check_pairing(policy, inst.space.kind, inst.variant, inst.knowledge)
    if msg:
        print(msg, file=sys.stderr)
        return USAGE_ERROR
    out = simulate(inst, policy)
    bad = verify_outcome(inst, out)
    if bad:
        print("infeasible outcome: " + "; ".join(bad), file=sys.stderr)
        return BOUND_ERROR
    line = f"completion {_num(out.completion)}"
    if inst.n <= DP_CAP:
        opt = opt_makespan(inst).makespan
        if opt > EPS:
            line += f", opt {_num(opt)}, ratio {_num(out.completion / opt)}"
        else:
            line += f", opt {_num(opt)}"
    print(line)
    if args.trace:
        print(outcome_to_text(out, inst.space), end="")
    return 0


def _cmd_oracle(args) -> int:
    with open(args.instance, "r", encoding="utf-8") as fh:
        inst = decode(fh.read())
    res = opt_makespan(inst)
    order = ",".join(str(i) for i in res.order)
    times = ",".join(_num(t) for t in res.per_step_times)
    print(f"makespan {_num(res.makespan)}")
    print(f"order {order}")
    print(f"service_times {times}")
    return 0


def _gen_instance(kind: str, n: int, seed: int, horizon: float, variant: str,
                  knowledge: str, space_args: dict) -> Instance:
    params = GenParams(n=n, seed=seed, release_horizon=horizon, space_params=space_args)
    return generate_random(params, kind, variant=variant, knowledge=knowledge)


def _cmd_gen(args) -> int:
    space_args = {}
    if args.kind == "ring":
        space_args = {"circumference": args.circumference, "non_line_like": args.non_line_like}
    elif args.kind == "star":
        space_args = {"ray_count": args.rays, "depth_max": args.length}
    elif args.kind == "semiline":
        space_args = {"length": args.length}
    elif args.kind == "line":
        space_args = {"half_width": args.length}
    elif args.kind == "general":
        space_args = {"asymmetric": args.asymmetric}
    inst = _gen_instance(args.kind, args.n, args.seed, args.horizon,
                         args.variant, args.knowledge, space_args)
    text = encode(inst)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_batch(args) -> int:
    policy_probe = alg_mod.make_policy(args.policy)
    msg = _check_pairing(policy_probe, args.kind, args.variant,
                         LOCATIONS_KNOWN if not args.count_known else COUNT_KNOWN)
    if msg:
        print(msg, file=sys.stderr)
        return USAGE_ERROR
    space_args = {}
    if args.kind == "ring":
        space_args = {"circumference": args.circumference, "non_line_like": args.non_line_like}
    elif args.kind == "star":
        space_args = {"ray_count": args.rays, "depth_max": args.length}
    elif args.kind == "semiline":
        space_args = {"length": args.length}
    elif args.kind == "line":
        space_args = {"half_width": args.length}
    elif args.kind == "general":
        space_args = {"asymmetric": args.asymmetric}
    knowledge = COUNT_KNOWN if args.count_known else LOCATIONS_KNOWN
    rows: List[BatchRow] = []
    for i in range(args.count):
        seed = args.seed + i
        inst = _gen_instance(args.kind, args.n, seed, args.horizon, args.variant,
                             knowledge, space_args)
        policy = alg_mod.make_policy(args.policy)
        out = simulate(inst, policy)
        bad = verify_outcome(inst, out)
        if bad:
            print(f"seed {seed}: infeasible outcome: " + "; ".join(bad), file=sys.stderr)
            return BOUND_ERROR
        opt = opt_makespan(inst).makespan
        ratio = out.completion / opt if opt > EPS else (1.0 if out.completion <= EPS else float("inf"))
        rows.append(BatchRow(seed, args.policy, out.completion, opt, ratio))
    params = {
        "kind": args.kind, "variant": args.variant, "policy": args.policy,
        "count": args.count, "seed": args.seed, "n": args.n,
        "horizon": _num(args.horizon),
        "bound": _num(args.bound) if args.bound is not None else "none",
    }
    text = report(rows, args.format, args.bound, params)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.bound is not None:
        worst = [r for r in rows if r.ratio > args.bound + EPS]
        if worst:
            for r in worst[:5]:
                print(f"bound violated at seed {r.seed}: ratio {_num(r.ratio)}",
                      file=sys.stderr)
            return BOUND_ERROR
    return 0


def _cmd_adversary(args) -> int:
    adversary = adv_mod.make_adversary(args.name, args.epsilon)
    policy = alg_mod.make_policy(args.policy)
    msg = _check_pairing(policy, adversary.space.kind, adversary.variant,
                         adversary.knowledge)
    if msg:
        print(msg, file=sys.stderr)
        return USAGE_ERROR
    run = adv_mod.run_adversary(adversary, policy)
    print(
        f"forced {_num(run.forced_completion)}, opt {_num(run.opt_completion)}, "
        f"ratio {_num(run.forced_ratio)}"
    )
    if args.dump_instance:
        with open(args.dump_instance, "w", encoding="utf-8") as fh:
            fh.write(encode(run.materialized))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="oltsp-lab",
        description="Online TSP with known locations: simulator, policies, "
                    "offline oracle and adversary demonstrations.",
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    sim = sub.add_parser("simulate", help="run one policy on one instance file")
    sim.add_argument("--instance", required=True)
    sim.add_argument("--policy", required=True)
    sim.add_argument("--trace", action="store_true")
    sim.set_defaults(func=_cmd_simulate)

    orc = sub.add_parser("oracle", help="exact offline optimum of an instance file")
    orc.add_argument("--instance", required=True)
    orc.set_defaults(func=_cmd_oracle)

    gen = sub.add_parser("gen", help="generate a seeded random instance")
    gen.add_argument("--kind", required=True,
                     choices=["semiline", "line", "ring", "star", "general"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--horizon", type=float, default=1.0)
    gen.add_argument("--variant", choices=[OPEN, CLOSED], default=CLOSED)
    gen.add_argument("--knowledge", choices=[LOCATIONS_KNOWN, COUNT_KNOWN],
                     default=LOCATIONS_KNOWN)
    gen.add_argument("--out")
    gen.add_argument("--circumference", type=float, default=1.0)
    gen.add_argument("--rays", type=int, default=5)
    gen.add_argument("--length", type=float, default=1.0)
    gen.add_argument("--asymmetric", action="store_true")
    gen.add_argument("--non-line-like", action="store_true")
    gen.set_defaults(func=_cmd_gen)

    bat = sub.add_parser("batch", help="seeded ratio experiment against the oracle")
    bat.add_argument("--kind", required=True,
                     choices=["semiline", "line", "ring", "star", "general"])
    bat.add_argument("--variant", choices=[OPEN, CLOSED], required=True)
    bat.add_argument("--policy", required=True)
    bat.add_argument("--count", type=int, required=True)
    bat.add_argument("--seed", type=int, required=True)
    bat.add_argument("--bound", type=float, default=None)
    bat.add_argument("--format", choices=["csv", "json"], default="csv")
    bat.add_argument("--n", type=int, default=6)
    bat.add_argument("--horizon", type=float, default=1.0)
    bat.add_argument("--out")
    bat.add_argument("--count-known", action="store_true")
    bat.add_argument("--circumference", type=float, default=1.0)
    bat.add_argument("--rays", type=int, default=5)
    bat.add_argument("--length", type=float, default=1.0)
    bat.add_argument("--asymmetric", action="store_true")
    bat.add_argument("--non-line-like", action="store_true")
    bat.set_defaults(func=_cmd_batch)

    adv = sub.add_parser("adversary", help="run an adaptive lower-bound construction")
    adv.add_argument("--name", required=True)
    adv.add_argument("--policy", required=True)
    adv.add_argument("--epsilon", type=float, default=None)
    adv.add_argument("--dump-instance")
    adv.set_defaults(func=_cmd_adversary)
    return p


def run_cli(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, SimulationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, SimulationError):
            return BOUND_ERROR
        return USAGE_ERROR


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
