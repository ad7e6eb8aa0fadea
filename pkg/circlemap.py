# circlemap.py

import argparse
import json
import re
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from cli_models import (ArcModel, BirkhoffResponse, CertificateResponse, CorrelationResponse,
                        DecisionResponse, ErrorResponse, EvalResponse, LeoTimeResponse,
                        MeasureCheckResponse, MixingReportResponse, PeriodicArcResponse,
                        RotationSetResponse, WitnessModel)
from config import CircleMapConfig, default_config
from ergostat import (correlation_series, exact_correlation, mixing_report, orbit, orbit_average,
                      product_orbit_average, report_rows, write_csv)
from errors import CircleMapError
from logger import logger, set_log_level
from map_catalog import inv3_example, resolve_map, slope5_example, tent_invariant_example
from map_file import emit_map_file
from models import (Arc, CirclePoint, ReportRow, RotationPair, WindowSpec, fraction_str,
                    parse_fraction)
from observables import PairFunction, parse_pair_function, parse_test_function
from pa_map import verify_measure_preserving
from perturb import boost_slope, separate_critical_values, window_perturb
from rotor_leo import (find_periodic_arc, is_leo, leo_certificate, leo_time, rotate,
                       rotation_periodic_set)

Output = Tuple[str, str]  # (text, file suffix)

# A flag value such as -1/8 or -1/4:1/2 that argparse would take for an option
NEGATIVE_VALUE = re.compile(r'^-\d+(/\d+)?(:-?\d+(/\d+)?)?$')


def join_negative_values(argv: Sequence[str]) -> List[str]:
    """Rewrite "--flag -1/8" as "--flag=-1/8"."""
    joined: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if (token.startswith("--") and "=" not in token and i + 1 < len(argv)
                and NEGATIVE_VALUE.match(argv[i + 1])):
            joined.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        joined.append(token)
        i += 1
    return joined


# Argument types
def rational(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def positive_rational(text: str) -> Fraction:
    value = rational(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def arc(text: str) -> Arc:
    """START:LENGTH with 0 < LENGTH <= 1."""
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"arc must be START:LENGTH, got {text!r}")
    start, length = rational(parts[0]), rational(parts[1])
    if not 0 < length <= 1:
        raise argparse.ArgumentTypeError(f"arc length must lie in (0, 1], got {parts[1]}")
    return Arc(CirclePoint(start), length)


def partition(text: str) -> Tuple[Fraction, ...]:
    return tuple(rational(part) for part in text.split(","))


def observable(text: str):
    try:
        if "*" in text:
            return parse_pair_function(text)
        return parse_test_function(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(str(e))


def integer(text: str, minimum: int) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < minimum:
        raise argparse.ArgumentTypeError(f"must be at least {minimum}: {text!r}")
    return value


def positive_int(text: str) -> int:
    return integer(text, 1)


def non_negative_int(text: str) -> int:
    return integer(text, 0)


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def to_json(model: BaseModel, exclude_none: bool = False) -> Output:
    data = model.model_dump(mode="json", exclude_none=exclude_none)
    return json.dumps(data, indent=2) + "\n", "json"


# Subcommand handlers: (args, config) -> (text, suffix)
def cmd_verify(args, config: CircleMapConfig) -> Output:
    check = verify_measure_preserving(resolve_map(args.map))
    return to_json(MeasureCheckResponse.from_check(check), exclude_none=True)


def cmd_eval(args, config: CircleMapConfig) -> Output:
    f = resolve_map(args.map)
    return to_json(EvalResponse(x=fraction_str(args.x), value=str(f.eval(args.x)),
                                lifted=fraction_str(f.lift_eval(args.x))))


def cmd_rotate(args, config: CircleMapConfig) -> Output:
    h = rotate(resolve_map(args.map), RotationPair(args.alpha, args.beta))
    return emit_map_file(h), "map"


def cmd_perturb_window(args, config: CircleMapConfig) -> Output:
    f = resolve_map(args.map)
    if args.partition is not None:
        window = WindowSpec(args.arc, args.partition)
    else:
        window = WindowSpec.regular(args.arc, args.folds)
    return emit_map_file(window_perturb(f, window)), "map"


def cmd_perturb_separate(args, config: CircleMapConfig) -> Output:
    h = separate_critical_values(resolve_map(args.map), args.epsilon, config)
    return emit_map_file(h), "map"


def cmd_perturb_boost(args, config: CircleMapConfig) -> Output:
    h = boost_slope(resolve_map(args.map), args.folds, args.mesh)
    return emit_map_file(h), "map"


def cmd_leo_time(args, config: CircleMapConfig) -> Output:
    max_n = args.max_n if args.max_n is not None else config.leo_time_max_steps
    n = leo_time(resolve_map(args.map), args.arc, max_n)
    return to_json(LeoTimeResponse(arc=ArcModel.from_arc(args.arc), leo_time=n,
                                   timeout=n is None, max_n=max_n))


def cmd_leo_certify(args, config: CircleMapConfig) -> Output:
    certificate = leo_certificate(resolve_map(args.map), config)
    return to_json(CertificateResponse.from_certificate(certificate), exclude_none=True)


def cmd_leo_decide(args, config: CircleMapConfig) -> Output:
    decision = is_leo(resolve_map(args.map), args.max_period)
    return to_json(DecisionResponse.from_decision(decision), exclude_none=True)


def cmd_periodic_arcs(args, config: CircleMapConfig) -> Output:
    witness = find_periodic_arc(resolve_map(args.map), args.max_period)
    model = WitnessModel.from_witness(witness) if witness is not None else None
    return to_json(PeriodicArcResponse(witness=model))


def cmd_rotation_set(args, config: CircleMapConfig) -> Output:
    rotation_set = rotation_periodic_set(resolve_map(args.map), args.max_period)
    return to_json(RotationSetResponse.from_set(rotation_set))


def cmd_mix_correlation(args, config: CircleMapConfig) -> Output:
    f = resolve_map(args.map)
    if args.csv:
        label = f"corr{args.a}|{args.b}"
        series = correlation_series(f, args.a, args.b, args.n, config)
        rows = [ReportRow(label, n, value, float(abs(value))) for n, value in enumerate(series)]
        return write_csv(rows), "csv"
    value = exact_correlation(f, args.a, args.b, args.n, config)
    return to_json(CorrelationResponse(a=ArcModel.from_arc(args.a), b=ArcModel.from_arc(args.b),
                                       n=args.n, correlation=fraction_str(value)))


def cmd_mix_birkhoff(args, config: CircleMapConfig) -> Output:
    f = resolve_map(args.map)
    h = args.function
    length = config.birkhoff_length
    path_x = orbit(f, CirclePoint(args.x), length, config)
    if isinstance(h, PairFunction):
        if args.y is None:
            args.parser.error(f"product {h.identifier} needs --y")
        path_y = orbit(f, CirclePoint(args.y), length, config)
        value = product_orbit_average(h, path_x, path_y)
        exact_steps = min(path_x.exact_steps, path_y.exact_steps)
    else:
        value = orbit_average(h, path_x)
        exact_steps = path_x.exact_steps
    if args.csv:
        row = ReportRow(h.identifier, length, value, abs(value - h.integral()))
        return write_csv([row]), "csv"
    return to_json(BirkhoffResponse(function=h.identifier, length=length, value=value,
                                    integral=h.integral(), exact_steps=exact_steps))


def cmd_mix_report(args, config: CircleMapConfig) -> Output:
    report = mixing_report(resolve_map(args.map), config)
    if args.csv:
        return write_csv(report_rows(report)), "csv"
    return to_json(MixingReportResponse.from_report(report))


def cmd_examples_tent_invariant(args, config: CircleMapConfig) -> Output:
    return to_json(tent_invariant_example(args.alpha, args.beta, config))


def cmd_examples_slope5(args, config: CircleMapConfig) -> Output:
    return to_json(slope5_example(config))


def cmd_examples_inv3(args, config: CircleMapConfig) -> Output:
    return to_json(inv3_example())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default_config.seed,
                        help="seed for every randomized step (default 0)")
    common.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--output-dir", type=Path, default=None,
                        help="write <dir>/<subcommand>.<suffix> instead of stdout")

    stats = argparse.ArgumentParser(add_help=False)
    stats.add_argument("--length", type=positive_int, default=default_config.birkhoff_length,
                       help="orbit length of Birkhoff averages")
    stats.add_argument("--starts", type=positive_int, default=default_config.monte_carlo_starts,
                       help="Monte Carlo start points of the report")
    stats.add_argument("--depth", type=positive_int, default=default_config.correlation_depth,
                       help="preimage depth of the report's correlation sums")
    stats.add_argument("--threshold", type=positive_float, default=default_config.verdict_threshold,
                       help="verdict threshold of the report")
    stats.add_argument("--csv", action="store_true", help="emit CSV rows instead of JSON")

    parser = argparse.ArgumentParser(
        prog="circlemap",
        description="Exact piecewise-affine measure-preserving circle maps")
    commands = parser.add_subparsers(dest="command", required=True)

    def leaf(group, name: str, handler: Callable, help_text: str, parents=(common,)):
        sub = group.add_parser(name, parents=list(parents), help=help_text)
        command_name = name if group is commands else f"{group.dest}-{name}"
        sub.set_defaults(handler=handler, command_name=command_name, parser=sub)
        return sub

    def with_map(sub):
        sub.add_argument("map", help="map file or built-in name (tent, g, inv3, c3, valley)")
        return sub

    with_map(leaf(commands, "verify", cmd_verify, "check measure preservation"))

    sub = with_map(leaf(commands, "eval", cmd_eval, "evaluate f at a rational point"))
    sub.add_argument("--x", type=rational, required=True)

    sub = with_map(leaf(commands, "rotate", cmd_rotate, "emit r_alpha o f o r_beta"))
    sub.add_argument("--alpha", type=rational, default=Fraction(0))
    sub.add_argument("--beta", type=rational, default=Fraction(0))

    perturb = commands.add_parser("perturb", help="window perturbations")
    perturb_commands = perturb.add_subparsers(dest="perturb", required=True)
    sub = with_map(leaf(perturb_commands, "window", cmd_perturb_window, "fold f on an arc"))
    sub.add_argument("--arc", type=arc, required=True, help="START:LENGTH")
    folds = sub.add_mutually_exclusive_group()
    folds.add_argument("--folds", type=positive_int, default=3, help="regular fold count (odd)")
    folds.add_argument("--partition", type=partition, default=None,
                       help="comma separated sub-arc lengths (odd count, summing to LENGTH)")
    sub = with_map(leaf(perturb_commands, "separate", cmd_perturb_separate,
                        "make critical values pairwise distinct"))
    sub.add_argument("--epsilon", type=positive_rational, required=True)
    sub = with_map(leaf(perturb_commands, "boost", cmd_perturb_boost, "multiply slopes by folding"))
    sub.add_argument("--folds", type=positive_int, default=3)
    sub.add_argument("--mesh", type=positive_rational, required=True)

    leo = commands.add_parser("leo", help="leo time, certificates and decisions")
    leo_commands = leo.add_subparsers(dest="leo", required=True)
    sub = with_map(leaf(leo_commands, "time", cmd_leo_time, "smallest n with f^n(A) = S1"))
    sub.add_argument("--arc", type=arc, required=True, help="START:LENGTH")
    sub.add_argument("--max-n", type=positive_int, default=None)
    with_map(leaf(leo_commands, "certify", cmd_leo_certify, "leo certificate with stability radius"))
    sub = with_map(leaf(leo_commands, "decide", cmd_leo_decide, "decide leo for slope > 2"))
    sub.add_argument("--max-period", type=positive_int, default=None)

    sub = with_map(leaf(commands, "periodic-arcs", cmd_periodic_arcs, "find a periodic arc"))
    sub.add_argument("--max-period", type=positive_int, default=None)
    sub = with_map(leaf(commands, "rotation-set", cmd_rotation_set,
                        "rotations beta carrying a periodic arc"))
    sub.add_argument("--max-period", type=positive_int, default=None)

    mix = commands.add_parser("mix", help="ergodic statistics")
    mix_commands = mix.add_subparsers(dest="mix", required=True)
    sub = with_map(leaf(mix_commands, "correlation", cmd_mix_correlation,
                        "exact correlation of two arcs", parents=(common, stats)))
    sub.add_argument("--a", type=arc, required=True, help="START:LENGTH")
    sub.add_argument("--b", type=arc, required=True, help="START:LENGTH")
    sub.add_argument("--n", type=non_negative_int, default=1)
    sub = with_map(leaf(mix_commands, "birkhoff", cmd_mix_birkhoff,
                        "Birkhoff average of a test function", parents=(common, stats)))
    sub.add_argument("--function", type=observable, required=True,
                     help="cos<m>, sin<m>, ind:<start>:<length>, or a product u*v")
    sub.add_argument("--x", type=rational, default=Fraction(1, 3))
    sub.add_argument("--y", type=rational, default=None)
    with_map(leaf(mix_commands, "report", cmd_mix_report, "mixing report",
                  parents=(common, stats)))

    examples = commands.add_parser("examples", help="worked examples")
    example_commands = examples.add_subparsers(dest="examples", required=True)
    sub = leaf(example_commands, "tent-invariant", cmd_examples_tent_invariant,
               "invariant arc of a rotated tent map")
    sub.add_argument("--alpha", type=rational, default=Fraction(-1, 8))
    sub.add_argument("--beta", type=rational, default=Fraction(-3, 32))
    leaf(example_commands, "slope5", cmd_examples_slope5, "the slope-5 map is leo")
    leaf(example_commands, "inv3", cmd_examples_inv3, "periodic arc and rotation set of inv3")
    return parser


def config_from_args(args) -> CircleMapConfig:
    overrides = {"seed": args.seed}
    for flag, name in (("length", "birkhoff_length"), ("starts", "monte_carlo_starts"),
                       ("depth", "correlation_depth"), ("threshold", "verdict_threshold")):
        if hasattr(args, flag):
            overrides[name] = getattr(args, flag)
    return replace(default_config, **overrides)


def write_output(args, text: str, suffix: str) -> None:
    if args.output_dir is None:
        sys.stdout.write(text)
        return
    args.output_dir.mkdir(parents=True, exist_ok=True)
    file_path = args.output_dir / f"{args.command_name}.{suffix}"
    with open(file_path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info(f"wrote {file_path}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = join_negative_values(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    set_log_level(args.log_level)
    config = config_from_args(args)

    logger.info(f"=== circlemap {args.command_name} ===")
    try:
        text, suffix = args.handler(args, config)
    except CircleMapError as e:
        logger.info(f"{args.command_name} failed with {e.code}: {e}")
        error = ErrorResponse(error=e.code, detail=str(e))
        sys.stdout.write(json.dumps(error.model_dump(), indent=2) + "\n")
        return 1

    write_output(args, text, suffix)
    return 0


if __name__ == "__main__":
    sys.exit(main())
