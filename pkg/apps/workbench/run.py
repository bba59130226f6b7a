"""Command-line entry point: generate, run, verify, experiment."""
import argparse
import logging
import sys
from typing import List, Optional

import orjson
from dotenv import load_dotenv
from pydantic import ValidationError

from analysis import verify_pipeline
from errors import DomainError, InstanceFormatError, WorkbenchError
from experiments import CampaignSpec, ExperimentRow, lower_bound_sweep, parse_m_range, run_campaign, write_csv
from greedy import TieBreakPolicy, run_greedy
from instance import (
    Assignment,
    Instance,
    batches_for_gap,
    check_capacities,
    gen_lower_bound,
    gen_random,
    make_assignment,
    parse_instance,
    serialize_instance,
)
from numeric import close, competitive_bound, format_number, format_ratio, ratio
from opt_solver import brute_force_opt, solve_opt
from settings import Settings
from store import dump_document, read_bytes, read_document, write_document, write_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2


def _number(x, args) -> str:
    """JSON numbers are canonical text; plain output honours --exact."""
    return format_number(x) if args.json else format_ratio(x, args.exact)


def _emit(args, document: dict) -> None:
    if args.json:
        write_text(None, dump_document(document))
        return
    for key, value in document.items():
        if isinstance(value, (dict, list)):
            continue
        print(f"{key}: {'' if value is None else value}")


def _load(path: str) -> Instance:
    return parse_instance(read_bytes(path))


def _load_adversary(path: str, inst: Instance) -> Assignment:
    """An adversary document holds {"assignment": [site per request]}."""
    try:
        document = read_document(path)
    except orjson.JSONDecodeError as e:
        raise InstanceFormatError(f"{path}: invalid JSON: {e.msg}", line=e.lineno, column=e.colno) from e
    if not isinstance(document, dict) or not isinstance(document.get("assignment"), list):
        raise DomainError(f"{path}: adversary document needs an assignment list")
    adversary = make_assignment(inst, document["assignment"])
    check_capacities(inst, adversary, online=False)
    return adversary


def _policy(args, settings: Settings) -> TieBreakPolicy:
    return TieBreakPolicy(getattr(args, "policy", None) or settings.TIE_BREAK_POLICY)


def _seed(args, settings: Settings) -> int:
    return settings.MASTER_SEED if args.seed is None else args.seed


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_generate(args, settings: Settings) -> int:
    if args.family == "lowerbound":
        if args.m is None:
            raise DomainError("generate lowerbound needs --m")
        epsilon = args.epsilon if args.epsilon is not None else settings.LOWER_BOUND_EPSILON
        inst = gen_lower_bound(args.k, args.m, epsilon)
    else:
        inst = gen_random(
            args.sites,
            args.requests,
            args.k,
            args.space,
            args.capacity_max if args.capacity_max is not None else settings.CAMPAIGN_CAPACITY_MAX,
            _seed(args, settings),
        )
    write_text(args.out, serialize_instance(inst))
    logger.info(f"✓ Generated {args.family} instance: {inst.site_count} sites, {inst.request_count} requests, k={inst.k}")
    return EXIT_OK


def cmd_run(args, settings: Settings) -> int:
    inst = _load(args.instance)
    policy = _policy(args, settings)
    online, _ = run_greedy(inst, policy)
    report = {
        "sites": inst.site_count,
        "requests": inst.request_count,
        "k": inst.k,
        "policy": policy.value,
        "greedy_cost": _number(online.total_cost, args),
    }
    status = EXIT_OK
    if args.with_opt or args.cross_check:
        opt = solve_opt(inst).assignment.total_cost
        report["opt_cost"] = _number(opt, args)
        report["ratio"] = _number(ratio(online.total_cost, opt), args) if opt else None
        if inst.k >= 3:
            report["bound"] = _number(competitive_bound(inst.k), args)
    if args.cross_check:
        exhaustive = brute_force_opt(inst, settings.BRUTE_FORCE_MAX_REQUESTS)
        report["brute_force_cost"] = _number(exhaustive, args)
        if not close(opt, exhaustive, settings.FLOAT_TOLERANCE):
            logger.error(f"Solver OPT {opt} differs from exhaustive search {exhaustive}")
            status = EXIT_VERIFICATION_FAILED
    if args.json:
        report["assignment"] = list(online.mapping)
    _emit(args, report)
    return status


def _verify_instance(args, settings: Settings) -> int:
    inst = _load(args.instance)
    if inst.k < 3:
        raise DomainError(f"verify needs k >= 3 (instance has k={inst.k}); 1 + 2/(k-2) is undefined below 3")
    adversary = _load_adversary(args.adversary, inst) if args.adversary else None
    result = verify_pipeline(inst, _policy(args, settings), adversary, tol=settings.FLOAT_TOLERANCE)
    report = result.report
    document = report.to_document()
    if args.report:
        write_document(args.report, document)
    if args.json:
        _emit(args, document)
    else:
        _emit(args, {key: document[key] for key in ("k", "bound", "greedy_total", "adversary_total", "ratio", "pass")})
        print(f"trees: {len(report.trees)}")
        for failure in document["failures"]:
            print(f"FAIL {failure['lemma']} tree={failure['tree_id']} node={failure['node']}: {failure['lhs']} vs {failure['rhs']} {failure['detail']}")

    if report.passed:
        logger.info(f"✓ All checks passed over {len(report.trees)} response trees")
        return EXIT_OK
    logger.error(f"{len(report.failures)} checks failed")
    return EXIT_VERIFICATION_FAILED


def _verify_campaign(args, settings: Settings) -> int:
    master = _seed(args, settings)
    summary = {"master_seed": master, "campaigns": []}
    failed_total = 0
    for k in args.k or [3, 4, 5]:
        spec = CampaignSpec(
            k=k,
            count=args.random_campaign,
            spaces=tuple(args.space or ("line", "plane")),
            max_sites=settings.CAMPAIGN_MAX_SITES,
            max_requests=settings.CAMPAIGN_MAX_REQUESTS,
            capacity_max=settings.CAMPAIGN_CAPACITY_MAX,
            master_seed=master,
            policy=_policy(args, settings),
            tol=settings.FLOAT_TOLERANCE,
        )
        outcomes = run_campaign(spec, settings.CAMPAIGN_WORKERS)
        failures = [o for o in outcomes if not o.row.lemma_pass]
        failed_total += len(failures)
        worst = max((o.row.ratio for o in outcomes if o.row.ratio is not None), default=None)
        summary["campaigns"].append(
            {
                "k": k,
                "instances": len(outcomes),
                "failed": len(failures),
                "bound": format_number(competitive_bound(k)),
                "max_ratio": None if worst is None else format_number(worst),
                "failures": [
                    {"instance_id": o.row.instance_id, "seed": o.row.m_or_seed, "space": o.space, **o.report.to_document()}
                    for o in failures
                ],
            }
        )

    if args.json:
        _emit(args, summary)
    else:
        for c in summary["campaigns"]:
            print(f"k={c['k']}: {c['instances']} instances, {c['failed']} failed, max ratio {c['max_ratio']} (bound {c['bound']})")
            for f in c["failures"]:
                print(f"  FAIL instance {f['instance_id']} seed {f['seed']} ({f['space']})")
    return EXIT_VERIFICATION_FAILED if failed_total else EXIT_OK


def cmd_verify(args, settings: Settings) -> int:
    if args.random_campaign is not None:
        return _verify_campaign(args, settings)
    if args.instance is None:
        raise DomainError("verify needs an instance path or --random-campaign N")
    return _verify_instance(args, settings)


def cmd_experiment(args, settings: Settings) -> int:
    k = args.k
    policy = _policy(args, settings)

    if args.family == "lowerbound":
        if (args.m_range is None) == (args.gap is None):
            raise DomainError("experiment --family lowerbound needs exactly one of --m-range A..B or --gap G")
        if args.gap is not None:
            lo, hi = 1, batches_for_gap(k, args.gap)
            logger.info(f"Gap {args.gap} at k={k} needs {hi} batches")
        else:
            lo, hi = parse_m_range(args.m_range)
        epsilon = args.epsilon if args.epsilon is not None else settings.LOWER_BOUND_EPSILON
        outcomes = lower_bound_sweep(k, lo, hi, epsilon, policy, settings.FLOAT_TOLERANCE, settings.FULL_CHECK_MAX_REQUESTS)
    else:
        spec = CampaignSpec(
            k=k,
            count=args.count if args.count is not None else settings.CAMPAIGN_INSTANCES,
            spaces=tuple(args.space or ("line", "plane")),
            max_sites=settings.CAMPAIGN_MAX_SITES,
            max_requests=settings.CAMPAIGN_MAX_REQUESTS,
            capacity_max=settings.CAMPAIGN_CAPACITY_MAX,
            master_seed=_seed(args, settings),
            policy=policy,
            tol=settings.FLOAT_TOLERANCE,
        )
        outcomes = run_campaign(spec, settings.CAMPAIGN_WORKERS)

    rows: List[ExperimentRow] = [o.row for o in outcomes]
    write_csv(rows, sys.stdout, exact=args.exact)
    sys.stdout.flush()
    return EXIT_OK if all(r.lemma_pass for r in rows) else EXIT_VERIFICATION_FAILED


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
    parser.add_argument("--json", action="store_true", default=default(False), help="Machine-readable JSON output")
    parser.add_argument("--exact", action="store_true", default=default(False), help="Print rationals as p/q")
    parser.add_argument("--seed", type=int, default=default(None), help="Master seed (defaults to MASTER_SEED)")
    parser.add_argument("--log-level", default=default(None), help="Override LOG_LEVEL")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="workbench", description="Online transportation GREEDY_k workbench")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    policies = [p.value for p in TieBreakPolicy]

    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[common], help="Write a canonical instance document")
    gen.add_argument("family", choices=["lowerbound", "random"])
    gen.add_argument("--k", type=int, required=True, help="Resource augmentation factor")
    gen.add_argument("--m", type=int, help="Number of batches (lowerbound)")
    gen.add_argument("--epsilon", help="Request shift (lowerbound), decimal or p/q")
    gen.add_argument("--sites", type=int, default=10, help="Site count (random)")
    gen.add_argument("--requests", type=int, default=20, help="Request count (random)")
    gen.add_argument("--space", choices=["line", "plane"], default="line", help="Metric (random)")
    gen.add_argument("--capacity-max", type=int, help="Largest adversary capacity (random)")
    gen.add_argument("--out", help="Output path (stdout when omitted)")
    gen.set_defaults(handler=cmd_generate)

    run = sub.add_parser("run", parents=[common], help="Simulate greedy on an instance")
    run.add_argument("instance", help="Instance path, or - for stdin")
    run.add_argument("--policy", choices=policies)
    run.add_argument("--with-opt", action="store_true", help="Also solve OPT and report the ratio")
    run.add_argument("--cross-check", action="store_true", help="Also compare OPT against exhaustive search (small instances)")
    run.set_defaults(handler=cmd_run)

    ver = sub.add_parser("verify", parents=[common], help="Check every inequality of the greedy analysis")
    ver.add_argument("instance", nargs="?", help="Instance path, or - for stdin")
    ver.add_argument("--policy", choices=policies)
    ver.add_argument("--adversary", help="Adversary assignment document to check against instead of OPT")
    ver.add_argument("--report", help="Also write the full lemma report document here")
    ver.add_argument("--random-campaign", type=int, metavar="N", help="Verify N seeded random instances per k")
    ver.add_argument("--k", type=int, nargs="+", help="Augmentation factors for the campaign")
    ver.add_argument("--space", nargs="+", choices=["line", "plane"])
    ver.set_defaults(handler=cmd_verify)

    exp = sub.add_parser("experiment", parents=[common], help="Emit experiment rows as CSV")
    exp.add_argument("--family", choices=["lowerbound", "random"], required=True)
    exp.add_argument("--k", type=int, required=True, help="Resource augmentation factor")
    exp.add_argument("--m-range", help="Batch counts A..B (lowerbound)")
    exp.add_argument("--gap", help="Sweep m = 1.. until greedy exceeds (1 + 2/(k-2) - gap) * OPT (lowerbound)")
    exp.add_argument("--epsilon", help="Request shift (lowerbound)")
    exp.add_argument("--count", type=int, help="Instances (random)")
    exp.add_argument("--space", nargs="+", choices=["line", "plane"])
    exp.add_argument("--policy", choices=policies)
    exp.set_defaults(handler=cmd_experiment)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    load_dotenv()
    try:
        settings = Settings()
        settings.validate_required_fields()
    except (ValidationError, DomainError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE

    level = (args.log_level or settings.LOG_LEVEL).upper()
    if not isinstance(getattr(logging, level, None), int):
        print(f"unknown log level: {level}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=getattr(logging, level), format="%(asctime)s [%(levelname)s] %(message)s", stream=sys.stderr)
    if level == "DEBUG":
        settings.print_summary()
    logger.debug(f"Command: {args.command}")

    try:
        return args.handler(args, settings)
    except WorkbenchError as e:
        logger.error(e.message)
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
