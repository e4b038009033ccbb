import argparse
import logging
import math
import sys
import traceback
import typing as t
from pathlib import Path

from .common.output import dump_json, frame_to_csv
from .const import THREADS_ENV
from .core import bounds, oracle, placement, system as systems
from .core.estimation import LogdetObjective, log_ellipsoid_volume, mmse_report
from .core.stacked import atoms_for
from .errors import (
    CholeskyFailure,
    ExcludedDomainError,
    Infeasible,
    InfeasibleAlpha,
    InvalidSensorSet,
    MuEqualsZero,
    SensorPlacementError,
    TooLarge,
)
from .models import (
    GeneratorKind,
    LtvSystem,
    NoisePriorSummary,
    PlacementMode,
    PlacementStatus,
    RunConfiguration,
    SensorSet,
    Target,
    UpdateMode,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_EXCLUDED_DOMAIN = 4
EXIT_TOO_LARGE = 5

COR2_UNREACHABLE = "alpha_unreachable"
COR2_NO_SENSORS = "no_sensors"
COR2_MU_ZERO = "mu_zero"

cli_log = logging.getLogger("sensorplace.cli")


class UsageError(ValueError):
    pass


def resolve_system_path(path_arg: str) -> t.Union[Path, t.IO[str]]:
    """Resolve system source, remapping 'DEMO' to the bundled chain and '-' to stdin."""
    if path_arg == "-":
        return sys.stdin
    if path_arg.upper() == "DEMO":
        return Path(__file__).parent / "yaml" / "chain.yaml"
    return Path(path_arg).resolve()


def load_system(path_arg: str) -> LtvSystem:
    return LtvSystem.load(resolve_system_path(path_arg))


def emit(text: str, path: t.Optional[str] = None):
    if path and path != "-":
        Path(path).write_text(text + ("" if text.endswith("\n") else "\n"))
        cli_log.info(f"Output written to {path}")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def exit_code(error: BaseException) -> int:
    if isinstance(error, TooLarge):
        return EXIT_TOO_LARGE
    if isinstance(error, ExcludedDomainError):
        return EXIT_EXCLUDED_DOMAIN
    if isinstance(error, (Infeasible, InfeasibleAlpha)):
        return EXIT_INFEASIBLE
    if isinstance(error, CholeskyFailure):
        return EXIT_FAILURE
    if isinstance(error, (SensorPlacementError, ValueError, OSError)):
        return EXIT_USAGE
    return EXIT_FAILURE


def resolve_config(args: argparse.Namespace) -> RunConfiguration:
    return RunConfiguration.from_env(
        threads=args.threads,
        lazy=getattr(args, "lazy", None),
        update=getattr(args, "update", None),
        seed=getattr(args, "seed", None),
    )


def cmd_gen(args: argparse.Namespace) -> int:
    kind = GeneratorKind(args.kind)
    sigma, x0_var, w_var = args.sigma, args.x0_var, args.w_var
    if args.identity_cov:
        sigma, x0_var, w_var = 1.0, 1.0, 1.0
    if kind == GeneratorKind.RANDOM:
        if args.n is None:
            raise UsageError("gen random requires --n")
        system = systems.gen_random_system(
            args.n,
            args.k,
            seed=args.seed,
            mu=args.mu,
            zero_process_noise=args.zero_process_noise,
            time_varying=args.time_varying,
        )
    else:
        if kind == GeneratorKind.CHAIN:
            if args.n is None:
                raise UsageError("gen chain requires --n")
            dynamics = systems.gen_integrator_chain(args.n)
        else:
            if args.rows is None or args.cols is None or args.coupling is None:
                raise UsageError("gen grid requires --rows, --cols and --coupling")
            dynamics = systems.gen_diffusion_grid(args.rows, args.cols, args.coupling)
        system = systems.build_system(
            dynamics,
            args.k,
            sigma=sigma,
            x0_variance=x0_var,
            w_variance=w_var,
            zero_process_noise=args.zero_process_noise,
        )
    emit(system.dump(), args.output)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    system = load_system(args.system)
    S = SensorSet.parse(args.sensors, system.n)
    report = mmse_report(system, atoms_for(system), S)
    payload = report.model_dump(mode="json")
    if args.epsilon is not None:
        payload["log_ellipsoid_volume"] = log_ellipsoid_volume(
            system, report.logdet_error, args.epsilon
        )
    emit(dump_json(payload))
    return EXIT_OK


def cmd_place(args: argparse.Namespace) -> int:
    mode = PlacementMode(args.mode)
    if mode == PlacementMode.P1:
        if args.budget is None:
            raise UsageError("--mode p1 requires --budget")
        if args.r is not None or args.l is not None:
            raise UsageError("--r and --l apply to --mode p2 only")
    else:
        if args.r is None:
            raise UsageError("--mode p2 requires --r")
        if args.budget is not None:
            raise UsageError("--budget applies to --mode p1 only")

    system = load_system(args.system)
    atoms = atoms_for(system)
    config = resolve_config(args)
    if mode == PlacementMode.P1:
        result = placement.greedy_p1(system, atoms, args.budget, config=config)
    else:
        result = placement.greedy_p2(system, atoms, args.r, l=args.l, config=config)
    cli_log.info(
        f"Placed {len(result.chosen)} sensors {result.chosen} "
        f"with {result.evaluations} evaluations"
    )
    emit(dump_json(result.to_output()))
    if result.status == PlacementStatus.BUDGET_INFEASIBLE:
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    system = load_system(args.system)
    S = SensorSet.parse(args.sensors, system.n)
    target = Target(args.target)
    atoms = atoms_for(system)
    summary = systems.noise_prior_summary(system)
    report = bounds.theorem1_bounds(summary, atoms.maps, S, target, system.sigma)
    payload: t.Dict[str, t.Any] = report.model_dump(mode="json")
    payload["mu"] = summary.mu
    payload["empty_set_logdet_bound"] = bounds.empty_set_logdet_bound(
        summary, system.n, system.k, reduced=system.zero_process_noise
    )
    if args.alpha is not None:
        cor1 = bounds.corollary1_min_sensors(
            summary, args.alpha, system.k, system.n, system.sigma, report.l_i
        )
        payload["cor1_min_sensors"] = cor1
        payload["cor1_min_sensors_ceil"] = _ceil(cor1)
        payload.update(_interval_bound(summary, args.alpha, system, S, report.l_i))
    emit(dump_json(payload))
    return EXIT_OK


def _interval_bound(
    summary: NoisePriorSummary,
    alpha: float,
    system: LtvSystem,
    S: SensorSet,
    l_i: float,
) -> t.Dict[str, t.Any]:
    """Interval bound keys; a null value carries the reason in `cor2_reason`."""
    try:
        cor2 = bounds.corollary2_min_interval(
            summary, alpha, system.n, system.sigma, len(S), l_i
        )
    except (InfeasibleAlpha, InvalidSensorSet, MuEqualsZero) as e:
        cli_log.info(str(e))
        reasons = {
            InfeasibleAlpha: COR2_UNREACHABLE,
            InvalidSensorSet: COR2_NO_SENSORS,
            MuEqualsZero: COR2_MU_ZERO,
        }
        return {
            "cor2_min_interval": None,
            "cor2_min_interval_ceil": None,
            "cor2_infeasible": isinstance(e, InfeasibleAlpha),
            "cor2_reason": reasons[type(e)],
        }
    return {
        "cor2_min_interval": cor2,
        "cor2_min_interval_ceil": _ceil(cor2),
        "cor2_infeasible": False,
        "cor2_reason": None,
    }


def _ceil(value: float) -> int:
    """Integer requirement from a real bound, ignoring rounding noise."""
    return max(math.ceil(value - 1e-9), 0)


def _budget_range(start: float, stop: float, step: float) -> t.List[float]:
    if step == 0 or (stop - start) * step < 0:
        raise UsageError(f"Budget step {step} does not lead from {start} to {stop}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def cmd_sweep(args: argparse.Namespace) -> int:
    system = load_system(args.system)
    atoms = atoms_for(system)
    config = resolve_config(args)
    mode = PlacementMode(args.mode)
    if mode == PlacementMode.P1:
        if args.budget_from is None or args.budget_to is None:
            raise UsageError("--mode p1 requires --budget-from and --budget-to")
        budgets = _budget_range(args.budget_from, args.budget_to, args.budget_step)
        frame = placement.sweep_p1(system, atoms, budgets, config=config)
    else:
        r_from = args.r_from
        r_to = system.n if args.r_to is None else args.r_to
        if args.step < 1:
            raise UsageError("--step must be positive")
        if r_from < 0 or r_to > system.n or r_from > r_to:
            raise UsageError(
                f"Invalid r range {r_from}..{r_to} for n={system.n}"
            )
        budgets = list(range(r_from, r_to + 1, args.step))
        frame = placement.sweep_p2(system, atoms, budgets, config=config)
        if args.baseline_samples:
            objective = LogdetObjective(system, atoms)
            frame["random_best"] = [
                oracle.random_baseline(
                    objective, r, args.baseline_samples, seed=config.seed
                )[1]
                for r in budgets
            ]
    emit(frame_to_csv(frame), args.output)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    system = load_system(args.system)
    config = resolve_config(args)
    table = oracle.enumerate_all(system, atoms_for(system), config=config)

    if args.dump:
        emit(frame_to_csv(table.to_frame()), args.dump)
        return EXIT_OK

    if args.check_supermodularity:
        violations = oracle.verify_supermodularity(table, config.supermodular_slack)
        decreasing = oracle.verify_monotonicity(table, config.supermodular_slack)
        emit(
            dump_json(
                {
                    "supermodularity_violations": len(violations),
                    "monotonicity_violations": len(decreasing),
                    "violations": [
                        v.model_dump(mode="json") for v in violations + decreasing
                    ],
                }
            )
        )
        return EXIT_OK if not violations and not decreasing else EXIT_FAILURE

    problem, value = args.optimal
    if problem.lower() not in (m.value for m in PlacementMode):
        raise UsageError(f"--optimal expects p1 or p2, got {problem!r}")
    if PlacementMode(problem.lower()) == PlacementMode.P1:
        S = oracle.optimal_p1(table, float(value))
    else:
        try:
            r = int(value)
        except ValueError:
            raise UsageError(f"p2 budget must be an integer, got {value!r}")
        S = oracle.optimal_p2(table, r)
    emit(dump_json({"chosen": S.values(), "logdet": table.value(S)}))
    return EXIT_OK


def _system_argument(parser: argparse.ArgumentParser):
    parser.add_argument(
        "system",
        help="Path to a JSON/YAML system file. Type DEMO for the bundled "
        "5-node chain or - to read stdin.",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sensorplace",
        description="Sensor placement for linear time-variant systems.\n\n"
        "Results are printed to stdout as JSON (CSV for sweeps and table\n"
        "dumps); logs go to stderr.\n"
        "\n"
        "Supported environment variables:\n"
        f"  {THREADS_ENV:<27} Worker threads when --threads is not given\n"
        "\n"
        "Exit codes: 0 ok, 2 usage or validation, 3 infeasible budget,\n"
        "4 excluded parameter domain, 5 size cap, 1 other failure.\n",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    parser.add_argument("-l", "--log", help="Path to log file")
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Enable verbose logging (sets log level to DEBUG)",
    )
    parser.add_argument(
        "--debug", action="store_true", help="Print tracebacks on failure"
    )
    parser.add_argument(
        "--threads", type=int, help=f"Worker threads (default ${THREADS_ENV} or cores)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate a system file")
    gen.add_argument("kind", choices=[g.value for g in GeneratorKind])
    gen.add_argument("--n", type=int, help="Chain length or random state size")
    gen.add_argument("--k", type=int, required=True, help="Last time index")
    gen.add_argument("--rows", type=int)
    gen.add_argument("--cols", type=int)
    gen.add_argument("--coupling", type=float)
    gen.add_argument("--sigma", type=float, default=1.0)
    gen.add_argument("--x0-var", type=float, default=1.0, help="C(x_0) = var * I")
    gen.add_argument("--w-var", type=float, default=1.0, help="C(w) = var * I")
    gen.add_argument(
        "--identity-cov",
        action="store_true",
        help="Identity C(x_0) and C(w), sigma = 1",
    )
    gen.add_argument("--zero-process-noise", action="store_true")
    gen.add_argument("--seed", type=int, help="Seed for gen random")
    gen.add_argument("--mu", type=float, default=0.9, help="Spectral norm for random A")
    gen.add_argument("--time-varying", action="store_true")
    gen.add_argument("-o", "--output", help="Write the system to a file")
    gen.set_defaults(handler=cmd_gen)

    evaluate = sub.add_parser("eval", help="Error statistics of a sensor set")
    _system_argument(evaluate)
    evaluate.add_argument("--sensors", default="", help="Comma separated, e.g. 3,5")
    evaluate.add_argument(
        "--epsilon", type=float, help="Also report the ellipsoid log-volume"
    )
    evaluate.set_defaults(handler=cmd_eval)

    place = sub.add_parser("place", help="Greedy sensor placement")
    _system_argument(place)
    place.add_argument(
        "--mode", choices=[m.value for m in PlacementMode], required=True
    )
    place.add_argument("--budget", type=float, help="Log-det budget R (p1)")
    place.add_argument("--r", type=int, help="Cardinality budget (p2)")
    place.add_argument("--l", type=int, help="Greedy additions, default r (p2)")
    place.add_argument("--lazy", action="store_true", default=None)
    place.add_argument("--update", choices=[u.value for u in UpdateMode])
    place.set_defaults(handler=cmd_place)

    bound = sub.add_parser("bounds", help="Fundamental limits for |S| sensors")
    _system_argument(bound)
    bound.add_argument("--sensors", default="")
    bound.add_argument("--target", choices=[x.value for x in Target], default="x0")
    bound.add_argument("--alpha", type=float, help="Target mmse for the trade-offs")
    bound.set_defaults(handler=cmd_bounds)

    sweep = sub.add_parser("sweep", help="Plot-ready greedy sweeps as CSV")
    _system_argument(sweep)
    sweep.add_argument("--mode", choices=[m.value for m in PlacementMode], default="p2")
    sweep.add_argument("--r-from", type=int, default=0)
    sweep.add_argument("--r-to", type=int)
    sweep.add_argument("--step", type=int, default=1)
    sweep.add_argument("--budget-from", type=float)
    sweep.add_argument("--budget-to", type=float)
    sweep.add_argument("--budget-step", type=float, default=-1.0)
    sweep.add_argument(
        "--baseline-samples",
        type=int,
        default=0,
        help="Add the best of N random r-subsets as random_best",
    )
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--lazy", action="store_true", default=None)
    sweep.add_argument("-o", "--output", help="Write the CSV to a file")
    sweep.set_defaults(handler=cmd_sweep)

    exhaustive = sub.add_parser("oracle", help="Exhaustive subset enumeration")
    _system_argument(exhaustive)
    action = exhaustive.add_mutually_exclusive_group(required=True)
    action.add_argument("--dump", metavar="PATH", help="Write bitmask,logdet CSV")
    action.add_argument("--check-supermodularity", action="store_true")
    action.add_argument("--optimal", nargs=2, metavar=("MODE", "VALUE"))
    exhaustive.set_defaults(handler=cmd_oracle)
    return parser


def setup_logging(args: argparse.Namespace):
    formatter = logging.Formatter(
        "%(asctime)s %(levelname)s: %(message)s", "%Y-%m-%d %H:%M:%S"
    )
    cli_log.setLevel(logging.INFO)
    cli_log.propagate = False
    package_log = logging.getLogger("sensorplace")
    package_log.setLevel(logging.DEBUG if args.verbose else logging.WARNING)

    # repeated in-process calls must not stack handlers
    for logger in (cli_log, package_log):
        for handler in list(logger.handlers):
            logger.removeHandler(handler)

    if args.log:
        handler: logging.Handler = logging.FileHandler(args.log)
    else:
        handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(formatter)
    cli_log.addHandler(handler)
    package_log.addHandler(handler)


def main(argv: t.Optional[t.Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args)
    try:
        return args.handler(args)
    except Exception as e:
        code = exit_code(e)
        cli_log.error(f"{type(e).__name__}: {e}")
        if args.debug:
            traceback.print_exc()
        return code


if __name__ == "__main__":
    try:
        sys.exit(main())
    except Exception as e:
        print(f"Error: {e}", file=sys.stderr)
        if "--debug" in sys.argv:
            traceback.print_exc()
        sys.exit(EXIT_FAILURE)
