"""Built-in fixture maps stored under maps/, and the worked examples that use them."""

from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Union

from cli_models import (CriticalDataResponse, Inv3Response, RotationSetResponse, Slope5Response,
                        TentInvariantResponse, WitnessModel)
from config import CircleMapConfig, default_config
from errors import MapParseError
from logger import logger
from map_file import parse_map_file
from models import Arc, CirclePoint, Rational, RotationPair
from pa_map import PAMap, critical_data, turning_points, verify_measure_preserving
from perturb import seeded_generator
from rotor_leo import (find_periodic_arc, growth_along_orbit, is_leo, leo_time, rotate,
                       rotation_periodic_set, tent_invariant_arc, tent_map)

MAPS_DIR = "maps"
BUILTIN_MAPS = ("tent", "g", "inv3", "c3", "valley")

SLOPE5_GRID = 5
SLOPE5_ARCS = 20
SLOPE5_ARC_LENGTH = Fraction(1, 2 ** 10)
SLOPE5_GROWTH_BOUND = Fraction(5, 3)


def maps_dir() -> Path:
    script_dir = Path(__file__).resolve().parent
    return script_dir / MAPS_DIR


def load_builtin(name: str) -> PAMap:
    """Load one of the fixture maps by name."""
    if name not in BUILTIN_MAPS:
        raise MapParseError(f"unknown built-in map {name!r}; choose from {', '.join(BUILTIN_MAPS)}")
    file_path = maps_dir() / f"{name}.map"
    with open(file_path, "r", encoding="utf-8") as f:
        return parse_map_file(f.read())


def load_all() -> Dict[str, PAMap]:
    return {name: load_builtin(name) for name in BUILTIN_MAPS}


def resolve_map(reference: Union[str, Path]) -> PAMap:
    """A map argument is a path to a map file or the name of a built-in map."""
    path = Path(reference)
    if path.is_file():
        logger.debug(f"loading map file {path}")
        with open(path, "r", encoding="utf-8") as f:
            return parse_map_file(f.read())
    if str(reference) in BUILTIN_MAPS:
        return load_builtin(str(reference))
    raise MapParseError(f"no map file or built-in map named {str(reference)!r}")


def tent_invariant_example(alpha: Rational, beta: Rational,
                           config: CircleMapConfig = default_config) -> TentInvariantResponse:
    """The invariant arc of the rotated tent map, and the leo time of its middle third."""
    check = tent_invariant_arc(alpha, beta)
    rotated = rotate(tent_map(), RotationPair(alpha, beta))
    third = check.arc.length / 3
    subarc = Arc(CirclePoint(check.arc.start.value + third), third)
    n = leo_time(rotated, subarc, config.leo_time_max_steps)
    return TentInvariantResponse.from_check(check, n)


def _slope5_rotations() -> List[RotationPair]:
    return [RotationPair(Fraction(i, SLOPE5_GRID), Fraction(j, SLOPE5_GRID + 2))
            for i in range(SLOPE5_GRID) for j in range(SLOPE5_GRID)]


def slope5_example(config: CircleMapConfig = default_config) -> Slope5Response:
    """g is leo, and so is every rotation of it on a small grid, with growth at least 5/3."""
    g = load_builtin("g")
    check = verify_measure_preserving(g)
    decision = is_leo(g)

    rng = seeded_generator(config.seed)
    resolution = 2 ** 20
    starts = [Fraction(int(k), resolution) for k in rng.integers(0, resolution, size=SLOPE5_ARCS)]
    arcs = [Arc(CirclePoint(s), SLOPE5_ARC_LENGTH) for s in starts]

    times: List[Optional[int]] = []
    min_growth: Optional[Fraction] = None
    rotations = _slope5_rotations()
    for rotation in rotations:
        h = rotate(g, rotation)
        for arc in arcs:
            times.append(leo_time(h, arc, config.leo_time_max_steps))
            for step in growth_along_orbit(h, arc, config.leo_time_max_steps):
                if step.ratio is None or step.turning_points_inside >= 3:
                    continue
                if min_growth is None or step.ratio < min_growth:
                    min_growth = step.ratio

    all_finite = all(t is not None for t in times)
    logger.info(f"slope-5 example: {len(rotations)} rotations x {len(arcs)} arcs, "
                f"all finite={all_finite}, min growth={min_growth}")
    return Slope5Response(
        measure_preserving=check.measure_preserving,
        leo=decision.leo,
        rotations=len(rotations),
        arcs_per_rotation=len(arcs),
        arc_length=str(SLOPE5_ARC_LENGTH),
        max_leo_time=max(times) if all_finite else None,
        all_finite=all_finite,
        min_growth=None if min_growth is None else str(min_growth),
        growth_bound=str(SLOPE5_GROWTH_BOUND),
        growth_bound_holds=min_growth is None or min_growth >= SLOPE5_GROWTH_BOUND,
    )


def inv3_example() -> Inv3Response:
    """inv3 carries the invariant arc [0, 1/2]; its rotation set is finite and contains 0."""
    f = load_builtin("inv3")
    data = critical_data(f)
    witness = find_periodic_arc(f)
    rotation_set = rotation_periodic_set(f)

    values = set(data.critical_values)
    equal_length = witness is not None and all(a.length == witness.arc.length for a in witness.orbit)
    endpoints = witness is not None and all(a.start in values and a.end in values
                                            for a in witness.orbit)
    periods = [w.period for _, witnesses in rotation_set.entries for w in witnesses]
    return Inv3Response(
        measure_preserving=verify_measure_preserving(f).measure_preserving,
        critical=CriticalDataResponse.from_data(data),
        witness=WitnessModel.from_witness(witness) if witness else None,
        equal_length_orbit=equal_length,
        endpoints_in_cv=endpoints,
        rotation_set=RotationSetResponse.from_set(rotation_set),
        contains_zero=0 in rotation_set,
        max_witness_period=max(periods, default=0),
        turning_point_count=len(turning_points(f)),
    )
