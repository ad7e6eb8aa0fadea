"""Perturbations that stay inside the measure-preserving piecewise-affine maps."""

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from config import CircleMapConfig, default_config
from errors import (EpsilonTooSmallError, InternalCheckError, InvalidWindowError,
                    NotMeasurePreservingError)
from logger import logger
from models import Arc, CirclePoint, Rational, TurningPoint, WindowSpec, circle_distance
from pa_map import (PAMap, _lifted_breakpoints, critical_data, sup_distance,
                    turning_points, verify_measure_preserving)

Node = Tuple[Fraction, Fraction]


def _require_measure_preserving(f: PAMap) -> None:
    check = verify_measure_preserving(f)
    if not check.measure_preserving:
        raise NotMeasurePreservingError(check.witness, check.branch_sum)


def _check_result(h: PAMap, what: str) -> None:
    check = verify_measure_preserving(h)
    if not check.measure_preserving:
        logger.error(f"{what} produced a map that does not preserve measure at y={check.witness}")
        raise InternalCheckError(f"{what} broke measure preservation at y={check.witness}")


def _replace_windows(f: PAMap, windows: Iterable[Tuple[Fraction, Fraction, List[Node]]]) -> PAMap:
    """Swap the lifting on each window [a, b] within [0, 1] for the given nodes."""
    windows = list(windows)
    nodes: Dict[Fraction, Fraction] = {}
    for x, v in zip(f.breakpoints, f.values):
        if not any(a < x < b for a, b, _ in windows):
            nodes[x] = v
    for _, _, window_nodes in windows:
        nodes.update(window_nodes)
    points = sorted(nodes)
    return PAMap(points, [nodes[x] for x in points], name=f.name)


def window_perturb(f: PAMap, window: WindowSpec) -> PAMap:
    """Replace f on the window arc by alternating rescaled copies of f restricted to it."""
    _require_measure_preserving(f)
    a, length = window.arc.start.value, window.arc.length
    b = a + length
    inner = [a] + _lifted_breakpoints(f, a, b) + [b]
    inner_values = [f.lift_eval(p) for p in inner]

    nodes: List[Node] = []
    offset = a
    for i, part in enumerate(window.partition):
        scale = part / length
        if i % 2 == 0:
            copy = [(offset + (p - a) * scale, v) for p, v in zip(inner, inner_values)]
        else:
            copy = [(offset + (b - p) * scale, v)
                    for p, v in zip(reversed(inner), reversed(inner_values))]
        nodes.extend(copy if not nodes else copy[1:])
        offset += part

    tail = _lifted_breakpoints(f, b, a + 1) + [a + 1]
    nodes.extend((p, f.lift_eval(p)) for p in tail)
    h = PAMap.from_lifted([p for p, _ in nodes], [v for _, v in nodes], name=f.name)
    _check_result(h, "window_perturb")
    logger.debug(f"window_perturb: {window.fold_count}-fold on {window.arc}")
    return h


def boost_slope(f: PAMap, m: int, mesh: Rational) -> PAMap:
    """Regular m-fold perturbation on every cell of a partition of mesh at most `mesh`."""
    if m < 3 or m % 2 == 0:
        raise InvalidWindowError(f"fold count must be odd and at least 3, got {m}")
    mesh = Fraction(mesh)
    if mesh <= 0:
        raise InvalidWindowError(f"mesh must be positive, got {mesh}")
    _require_measure_preserving(f)

    points, values = [Fraction(0)], [f.values[0]]
    for x0, x1, v0, v1 in f.segments():
        cells = math.ceil((x1 - x0) / mesh)
        width = (x1 - x0) / cells
        for j in range(cells):
            c0 = x0 + j * width
            w0 = v0 + (v1 - v0) * j / cells
            w1 = v0 + (v1 - v0) * (j + 1) / cells
            for fold in range(1, m + 1):
                points.append(c0 + width * fold / m)
                values.append(w1 if fold % 2 else w0)
    h = PAMap(points, values, name=f.name)
    _check_result(h, "boost_slope")
    logger.debug(f"boost_slope: {m}-fold, mesh {mesh}, min slope {f.min_abs_slope} -> {h.min_abs_slope}")
    return h


def _side_piece(f: PAMap, tp: TurningPoint, side: str) -> Tuple[Fraction, Fraction, Fraction]:
    """(turning point as a position in [0, 1], slope, length) of the piece on one side."""
    k = len(f.breakpoints) - 1
    if side == "left":
        i = tp.index - 1 if tp.index > 0 else k - 1
        c = f.breakpoints[tp.index] if tp.index > 0 else Fraction(1)
    else:
        i = tp.index
        c = f.breakpoints[tp.index]
    return c, f.slopes[i], f.breakpoints[i + 1] - f.breakpoints[i]


def _longer_side(f: PAMap, tp: TurningPoint) -> Tuple[str, Fraction, Fraction, Fraction]:
    left = _side_piece(f, tp, "left")
    right = _side_piece(f, tp, "right")
    if left[2] > right[2]:
        return ("left",) + left
    return ("right",) + right


def _value_gap(values: Iterable[CirclePoint], y: CirclePoint) -> Fraction:
    others = [circle_distance(v.value, y.value) for v in set(values) if v != y]
    return min(others) if others else Fraction(1, 2)


class _Offsets:
    """Dyadic offsets eps / 2^k with strictly increasing k."""

    def __init__(self, epsilon: Fraction, max_depth: int):
        self.epsilon = epsilon
        self.max_depth = max_depth
        self.k = 2

    def next_within(self, bound: Fraction) -> Fraction:
        k = self.k + 1
        while self.epsilon / 2 ** k > bound:
            k += 1
            if k > self.max_depth:
                raise EpsilonTooSmallError(
                    f"no offset eps/2^k <= {bound} with k <= {self.max_depth} (eps = {self.epsilon})")
        if k > self.max_depth:
            raise EpsilonTooSmallError(f"offset depth {self.max_depth} exhausted (eps = {self.epsilon})")
        self.k = k
        return self.epsilon / 2 ** k


def _fold_pair_nodes(y: Fraction, sigma: int, delta: Fraction, side: str, c: Fraction,
                     w: Fraction, eps_w: Fraction) -> Tuple[Fraction, Fraction, List[Node]]:
    p1, p2 = w - eps_w, eps_w / 2
    if side == "left":
        a = c - w
        return a, c, [(a, y + sigma * delta), (a + p1, y), (a + p1 + p2, y - sigma * delta), (c, y)]
    p3 = eps_w / 2
    return c, c + w, [(c, y), (c + p3, y - sigma * delta), (c + p3 + p2, y), (c + w, y + sigma * delta)]


def _separate_pair(f: PAMap, low: TurningPoint, high: TurningPoint, gap: Fraction,
                   offsets: _Offsets) -> PAMap:
    """Move a min to y - delta and a max with the same value to y + delta, preserving measure."""
    sides = [(low, +1) + _longer_side(f, low), (high, -1) + _longer_side(f, high)]
    bound = min([gap / 4] + [abs(s) * length / 4 for _, _, _, _, s, length in sides])
    delta = offsets.next_within(bound)
    widths = [delta / abs(s) for _, _, _, _, s, _ in sides]
    eps_w = min(widths) / 2
    windows = []
    for (tp, sigma, side, c, _, _), w in zip(sides, widths):
        y = f.lift_eval(c)
        windows.append(_fold_pair_nodes(y, sigma, delta, side, c, w, eps_w))
    logger.debug(f"separate: pair {low.point} (min) / {high.point} (max) at value "
                 f"{CirclePoint(low.value)}, offset {delta}")
    return _replace_windows(f, windows)


def _regular_preimages(f: PAMap, y: CirclePoint, skip: set) -> List[Tuple[Fraction, int]]:
    found = []
    for i, (x0, x1, v0, v1) in enumerate(f.segments()):
        lo, hi = min(v0, v1), max(v0, v1)
        for n in range(math.ceil(lo - y.value), math.floor(hi - y.value) + 1):
            t = x0 + (y.value + n - v0) * (x1 - x0) / (v1 - v0)
            if CirclePoint(t) not in skip:
                found.append((t, i))
    return found


def _add_opposite_extremum(f: PAMap, y: CirclePoint, kind: str, gap: Fraction,
                           offsets: _Offsets) -> PAMap:
    """Create a turning point of the type opposite to `kind` with critical value y."""
    need_min = kind == "max"
    skip = {tp.point for tp in turning_points(f)}
    best = None
    for t, i in _regular_preimages(f, y, skip):
        x0, x1 = f.breakpoints[i], f.breakpoints[i + 1]
        s = f.slopes[i]
        left = (need_min and s < 0) or (not need_min and s > 0)
        room = t - x0 if left else x1 - t
        if room > 0 and (best is None or room > best[0]):
            best = (room, t, s, left)
    if best is None:
        logger.error(f"no regular preimage of {y} to fold")
        raise InternalCheckError(f"no regular preimage of critical value {y}")
    room, t, s, left = best
    delta = offsets.next_within(min(gap / 4, abs(s) * room / 2))
    w = delta / abs(s)
    arc = Arc(CirclePoint(t - w if left else t), w)
    logger.debug(f"separate: folding at regular preimage {t} of {y} ({'left' if left else 'right'}), "
                 f"offset {delta}")
    return window_perturb(f, WindowSpec.regular(arc, 3))


def _duplicated_groups(f: PAMap) -> List[Tuple[CirclePoint, List[TurningPoint]]]:
    groups: Dict[CirclePoint, List[TurningPoint]] = {}
    for tp in turning_points(f):
        groups.setdefault(CirclePoint(tp.value), []).append(tp)
    dup = [(y, tps) for y, tps in groups.items() if len(tps) > 1]
    return sorted(dup, key=lambda item: (-len(item[1]), item[0]))


def _nearest_opposite_pair(tps: List[TurningPoint]) -> Optional[Tuple[TurningPoint, TurningPoint]]:
    lows = [tp for tp in tps if tp.kind == "min"]
    highs = [tp for tp in tps if tp.kind == "max"]
    pairs = [(circle_distance(lo.point.value, hi.point.value), lo.point, hi.point, lo, hi)
             for lo in lows for hi in highs]
    if not pairs:
        return None
    _, _, _, lo, hi = min(pairs, key=lambda p: p[:3])
    return lo, hi


def separate_critical_values(f: PAMap, epsilon: Rational,
                             config: CircleMapConfig = default_config) -> PAMap:
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise EpsilonTooSmallError(f"epsilon must be positive, got {epsilon}")
    _require_measure_preserving(f)
    groups = _duplicated_groups(f)
    if not groups:
        return f

    offsets = _Offsets(epsilon, config.max_offset_depth)
    max_steps = 2 * sum(len(tps) for _, tps in groups)
    h = f
    for _ in range(max_steps):
        groups = _duplicated_groups(h)
        if not groups:
            break
        y, tps = groups[0]
        gap = _value_gap(critical_data(h).critical_values, y)
        pair = _nearest_opposite_pair(tps)
        if pair is None:
            h = _add_opposite_extremum(h, y, tps[0].kind, gap, offsets)
        else:
            h = _separate_pair(h, pair[0], pair[1], gap, offsets)
    else:
        if _duplicated_groups(h):
            logger.error(f"separation did not finish within {max_steps} steps")
            raise InternalCheckError(f"critical values still duplicated after {max_steps} steps")

    _check_result(h, "separate_critical_values")
    if not critical_data(h).values_distinct:
        logger.error("separation left duplicated critical values")
        raise InternalCheckError("critical values are not pairwise distinct")
    distance = sup_distance(h, f)
    if distance >= epsilon:
        logger.error(f"separation moved the map by {distance} >= {epsilon}")
        raise InternalCheckError(f"rho(h, f) = {distance} is not below {epsilon}")
    if h.min_abs_slope < f.min_abs_slope:
        raise InternalCheckError("separation decreased the minimal slope")
    logger.info(f"separated critical values of {f}: {len(turning_points(h))} turning points, "
                f"rho = {distance}")
    return h


def seeded_generator(seed: int) -> np.random.Generator:
    """Counter-based Philox generator for a seed."""
    return np.random.Generator(np.random.Philox(seed))


def sample_map(seed: int, laps: int, boost: Optional[Tuple[int, Rational]] = None,
               separate: Optional[Rational] = None,
               config: CircleMapConfig = default_config) -> PAMap:
    """Random full-lap measure-preserving map, optionally boosted and separated.

    Each lap covers the circle exactly once (up or down), so the branch sum
    is the sum of the lap widths, which is 1.
    """
    if laps < 2:
        raise ValueError(f"laps must be at least 2, got {laps}")
    rng = seeded_generator(seed)
    low, high = config.sample_weight_range
    weights = rng.integers(low, high + 1, size=laps)
    ups = rng.integers(0, 2, size=laps).astype(bool)
    if ups.all():
        ups[-1] = False
    elif not ups.any():
        ups[-1] = True

    total = int(weights.sum())
    points, values = [Fraction(0)], [Fraction(0)]
    for weight, up in zip(weights, ups):
        points.append(points[-1] + Fraction(int(weight), total))
        values.append(values[-1] + (1 if up else -1))
    h = PAMap(points, values, name=f"sample-{seed}-{laps}")

    if boost is not None:
        h = boost_slope(h, boost[0], boost[1])
    if separate is not None:
        h = separate_critical_values(h, separate, config)
    _check_result(h, "sample_map")
    return h
