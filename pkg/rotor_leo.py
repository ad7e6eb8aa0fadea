"""Rotations T(alpha, beta), leo time, leo certificates, periodic arcs and the rotation set."""

import math
from bisect import bisect_left, bisect_right
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Tuple

import numpy as np

from config import CircleMapConfig, default_config
from errors import InternalCheckError, NotMeasurePreservingError, PreconditionSlopeError
from logger import logger
from models import (Arc, CirclePoint, Growth, GrowthStep, InvariantArcCheck, LeoCertificate,
                    LeoDecision, PeriodicArcWitness, Rational, RotationPair, RotationSet)
from pa_map import (PAMap, arc_orbit, critical_data, image_of_arc, preimages, turning_points,
                    verify_measure_preserving)

# Slope thresholds for the expansion arguments
CERTIFIED_SLOPE = 4
PERIODIC_ARC_SLOPE = 2


def rotate(f: PAMap, rotation: RotationPair) -> PAMap:
    """Exact r_alpha o f o r_beta."""
    alpha, beta = rotation.alpha.value, rotation.beta.value
    points = sorted({Fraction(0), Fraction(1)} | {(b - beta) % 1 for b in f.breakpoints})
    values = [f.lift_eval(x + beta) + alpha for x in points]
    return PAMap(points, values, name=f.name)


def tent_map() -> PAMap:
    return PAMap((0, Fraction(1, 2), 1), (0, 1, 0), name="tent")


def _representative(x: Fraction) -> Fraction:
    """Representative of x mod 1 in [-1/2, 1/2)."""
    return (x + Fraction(1, 2)) % 1 - Fraction(1, 2)


def tent_invariant_arc(alpha: Rational, beta: Rational) -> InvariantArcCheck:
    """The arc [-2 beta - alpha, 1 + alpha] of the rotated tent map and its exact image."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    a, b = _representative(alpha), _representative(beta)
    conditions = a < -b and a + b > Fraction(-1, 2)
    arc = Arc.between(-2 * beta - alpha, 1 + alpha)
    rotated = rotate(tent_map(), RotationPair(alpha, beta))
    image = image_of_arc(rotated, arc)
    logger.info(f"tent with alpha={alpha}, beta={beta}: J = {arc}, T(J) = {image}")
    return InvariantArcCheck(CirclePoint(alpha), CirclePoint(beta), conditions, arc, image)


def leo_time(f: PAMap, arc: Arc, max_n: int) -> Optional[int]:
    """Smallest n <= max_n with f^n(arc) = S1, or None (timeout)."""
    orbit = arc_orbit(f, arc, max_n)
    if orbit[-1].is_full:
        return len(orbit) - 1
    if len(orbit) <= max_n:
        logger.debug(f"leo_time: orbit of {arc} repeats at step {len(orbit) - 1}")
    return None


def growth_check(h: PAMap, arc: Arc) -> Growth:
    image = image_of_arc(h, arc)
    if image.is_full:
        return Growth(full=True)
    return Growth(full=False, ratio=image.length / arc.length)


def growth_along_orbit(f: PAMap, arc: Arc, max_n: int) -> List[GrowthStep]:
    """Per-step growth factors along the orbit of an arc, until S1 or max_n steps."""
    steps = []
    current = arc
    for _ in range(max_n):
        if current.is_full:
            break
        a, b = current.lifted()
        inside = sum(1 for tp in turning_points(f)
                     for n in range(math.floor(a), math.floor(b) + 1)
                     if a < tp.point.value + n < b)
        image = image_of_arc(f, current)
        ratio = None if image.is_full else image.length / current.length
        steps.append(GrowthStep(current, image, ratio, inside))
        current = image
    return steps


def _eta_raw(h: PAMap) -> Optional[Fraction]:
    """min H(C) - H(C') - 1 over lifted turning points |C - C'| < 1 with H(C) - H(C') > 1."""
    tps = turning_points(h)
    best = None
    for c in tps:
        for c2 in tps:
            for n in (-1, 0, 1):
                x, x2 = c.point.value + n, c2.point.value
                if abs(x - x2) >= 1:
                    continue
                surplus = h.lift_eval(x) - h.lift_eval(x2)
                if surplus > 1 and (best is None or surplus < best):
                    best = surplus
    return None if best is None else best - 1


def _slope_change_points(h: PAMap) -> List[Fraction]:
    slopes = h.slopes
    return [h.breakpoints[i] for i in range(len(slopes)) if slopes[i - 1] != slopes[i]]


def _candidate_points(h: PAMap) -> List[Fraction]:
    """Slope changes and preimages of critical values, in [0, 1)."""
    points = set(_slope_change_points(h))
    for value in set(critical_data(h).critical_values):
        points.update(preimages(h, value.value))
    return sorted(points)


def _sweep_nodes(nodes: List[Fraction], lifted: List[Fraction], p: Fraction, h0: Fraction,
                 degree: int, direction: int) -> Iterator[Tuple[Fraction, Fraction]]:
    """(distance, H) at the slope changes met walking once around the circle from p."""
    m = len(nodes)
    if direction > 0:
        first = bisect_right(nodes, p)
        steps = range(first, first + m)
    else:
        first = bisect_left(nodes, p) - 1
        steps = range(first, first - m, -1)
    for j in steps:
        shift, k = divmod(j, m)
        distance = direction * (nodes[k] + shift - p)
        if distance < 1:
            yield distance, lifted[k] + shift * degree
    yield Fraction(1), h0 + direction * degree


def _sweep_ratios(h0: Fraction, nodes: Iterable[Tuple[Fraction, Fraction]]) -> List[Fraction]:
    """Growth ratios of arcs from a fixed endpoint, where the lifting takes the value h0.

    H is affine between consecutive nodes, so on each piece the ratio is
    smallest at the node or where H leaves the range seen so far. Stops at
    the first arc whose image covers S1; the crossing point itself
    contributes its limit ratio 1/distance.
    """
    ratios = []
    d_prev, h_prev = Fraction(0), h0
    lo = hi = h0
    for d, value in nodes:
        bound = hi if value > hi else lo if value < lo else h_prev
        if bound != h_prev:
            leave = d_prev + (bound - h_prev) * (d - d_prev) / (value - h_prev)
            ratios.append((hi - lo) / leave)
        new_lo, new_hi = min(lo, value), max(hi, value)
        span = new_hi - new_lo
        if span > 1:
            target = lo + 1 if value > hi else hi - 1
            crossing = d_prev + (target - h_prev) * (d - d_prev) / (value - h_prev)
            ratios.append(1 / crossing)
            break
        ratios.append(span / d)
        if span == 1:
            break
        lo, hi, d_prev, h_prev = new_lo, new_hi, d, value
    return ratios


def _growth_minimum(h: PAMap) -> Fraction:
    """Smallest growth ratio, minus one, over arcs with an endpoint among the candidate points."""
    nodes = _slope_change_points(h)
    lifted = [h.lift_eval(x) for x in nodes]
    points = _candidate_points(h)
    best = None
    for p in points:
        h0 = h.lift_eval(p)
        for direction in (1, -1):
            low = min(_sweep_ratios(h0, _sweep_nodes(nodes, lifted, p, h0, h.degree, direction)))
            if best is None or low < best:
                best = low
    logger.debug(f"growth minimum of {h} over {len(points)} candidate endpoints: {best}")
    return best - 1


def _random_arcs(rng: np.random.Generator, count: int, resolution: int = 2 ** 20) -> List[Arc]:
    starts = rng.integers(0, resolution, size=count)
    lengths = rng.integers(1, resolution, size=count)
    return [Arc(CirclePoint(Fraction(int(s), resolution)), Fraction(int(n), resolution))
            for s, n in zip(starts, lengths)]


def _validate_delta(h: PAMap, delta_lb: Fraction, config: CircleMapConfig) -> None:
    rng = np.random.Generator(np.random.Philox(config.seed))
    for arc in _random_arcs(rng, config.certificate_validation_arcs):
        growth = growth_check(h, arc)
        if not growth.full and growth.ratio <= 1 + delta_lb:
            logger.error(f"random arc {arc} grows by {growth.ratio}, below 1 + delta_lb = {1 + delta_lb}")
            raise InternalCheckError(f"delta_lb = {delta_lb} is undercut by the arc {arc}")


def leo_certificate(h: PAMap, config: CircleMapConfig = default_config) -> LeoCertificate:
    check = verify_measure_preserving(h)
    if not check.measure_preserving:
        raise NotMeasurePreservingError(check.witness, check.branch_sum)

    slope = h.min_abs_slope
    if slope <= CERTIFIED_SLOPE:
        return LeoCertificate(False, f"minimal slope {slope} is not greater than {CERTIFIED_SLOPE}")
    data = critical_data(h)
    if not data.values_distinct:
        return LeoCertificate(False, "duplicate critical values")
    if data.kappa is None:
        return LeoCertificate(False, "fewer than two distinct critical values")
    eta_raw = _eta_raw(h)
    if eta_raw is None:
        return LeoCertificate(False, "no pair of turning points whose lap covers the circle")

    growth_min = _growth_minimum(h)
    if growth_min <= 0:
        return LeoCertificate(False, f"no positive growth margin (minimum ratio {1 + growth_min})")
    delta_lb = min(growth_min / 2, Fraction(1, 2))
    _validate_delta(h, delta_lb, config)

    eta = min(eta_raw, data.zeta / 2)
    epsilon = delta_lb / 2 * min(eta / 6, data.kappa / 3) / 2
    logger.info(f"certified {h}: kappa={data.kappa} zeta={data.zeta} eta={eta} "
                f"delta_lb={delta_lb} epsilon={epsilon}")
    return LeoCertificate(
        certified=True,
        kappa=data.kappa,
        zeta=data.zeta,
        eta=eta,
        eta_raw=eta_raw,
        xi=data.zeta / 2,
        delta_lb=delta_lb,
        growth_min=growth_min,
        epsilon=epsilon,
    )


def _require_slope(f: PAMap) -> None:
    if f.min_abs_slope <= PERIODIC_ARC_SLOPE:
        raise PreconditionSlopeError(f.min_abs_slope, Fraction(PERIODIC_ARC_SLOPE))


def _period_bound(f: PAMap, max_period: Optional[int]) -> Tuple[int, bool]:
    k = len(turning_points(f))
    if max_period is None or max_period >= k:
        return k, True
    logger.warning(f"period bound {max_period} is below the {k} turning points of {f}; "
                   f"a negative answer is not a proof of leo")
    return max_period, False


def _periodic_orbit(f: PAMap, arc: Arc, bound: int) -> Optional[PeriodicArcWitness]:
    orbit = arc_orbit(f, arc, bound)
    if len(orbit) > 1 and orbit[-1] == arc:
        return PeriodicArcWitness(arc, len(orbit) - 1, tuple(orbit[:-1]))
    return None


def find_periodic_arc(f: PAMap, max_period: Optional[int] = None) -> Optional[PeriodicArcWitness]:
    _require_slope(f)
    bound, _ = _period_bound(f, max_period)
    return _search_periodic_arcs(f, bound)


def periodic_arcs(f: PAMap, max_period: Optional[int] = None) -> List[PeriodicArcWitness]:
    """Every periodic arc with endpoints in CV(f), smallest period first."""
    _require_slope(f)
    bound, _ = _period_bound(f, max_period)
    return _periodic_witnesses(f, bound)


def _search_periodic_arcs(f: PAMap, bound: int) -> Optional[PeriodicArcWitness]:
    """Smallest period first, then smallest start, among arcs with endpoints in CV(f)."""
    witnesses = _periodic_witnesses(f, bound)
    return witnesses[0] if witnesses else None


def _periodic_witnesses(f: PAMap, bound: int) -> List[PeriodicArcWitness]:
    data = critical_data(f)
    critical_points = set(data.turning_points)
    values = data.distinct_values

    witnesses = []
    for i, u in enumerate(values):
        for v in values[i + 1:]:
            for arc in (Arc.between(u.value, v.value), Arc.between(v.value, u.value)):
                if arc.start in critical_points or arc.end in critical_points:
                    logger.warning(f"skipping candidate arc {arc}: endpoint is a turning point")
                    continue
                witness = _periodic_orbit(f, arc, bound)
                if witness is not None:
                    witnesses.append(witness)
    return sorted(witnesses, key=lambda w: (w.period, w.arc.start, w.arc.length))


def is_leo(f: PAMap, max_period: Optional[int] = None) -> LeoDecision:
    _require_slope(f)
    bound, exhaustive = _period_bound(f, max_period)
    witness = _search_periodic_arcs(f, bound)
    decision = LeoDecision(leo=witness is None, witness=witness, period_bound=bound,
                           exhaustive=exhaustive)
    if witness is None:
        logger.info(f"{f}: no periodic arc up to period {bound}, leo")
    else:
        logger.info(f"{f}: periodic arc {witness.arc} of period {witness.period}, not leo")
    return decision


def rotation_candidates(f: PAMap) -> List[Fraction]:
    """beta with f(v + beta) in CV(f) for some critical value v."""
    values = [v.value for v in critical_data(f).distinct_values]
    candidates = set()
    for w in values:
        for x in preimages(f, w):
            candidates.update((x - v) % 1 for v in values)
    return sorted(candidates)


def rotation_periodic_set(f: PAMap, max_period: Optional[int] = None) -> RotationSet:
    _require_slope(f)
    candidates = rotation_candidates(f)
    entries = []
    for beta in candidates:
        witnesses = periodic_arcs(rotate(f, RotationPair(0, beta)), max_period)
        logger.debug(f"rotation candidate beta={beta}: {len(witnesses)} periodic arcs")
        if witnesses:
            entries.append((CirclePoint(beta), tuple(witnesses)))
    logger.info(f"{f}: {len(entries)} of {len(candidates)} rotation candidates carry a periodic arc")
    return RotationSet(tuple(entries), len(candidates))
