"""Exact piecewise-affine circle maps.

A map is stored through its lifting F on [0, 1]: strictly increasing
breakpoints 0 = x_0 < ... < x_k = 1 and values v_i = F(x_i). Outside [0, 1]
the lifting is extended by F(x + n) = F(x) + n * degree.
"""

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from errors import MapValidationError, NoComponentError
from logger import logger
from models import (Arc, CirclePoint, CriticalData, MeasureCheck, Rational,
                    TurningPoint, arc_distance, circle_distance)

PointLike = Union[CirclePoint, Rational]


def _as_fraction(x: PointLike) -> Fraction:
    if isinstance(x, CirclePoint):
        return x.value
    return Fraction(x)


@dataclass(frozen=True)
class PAMap:
    breakpoints: Tuple[Fraction, ...]
    values: Tuple[Fraction, ...]
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        breakpoints = tuple(Fraction(x) for x in self.breakpoints)
        values = tuple(Fraction(v) for v in self.values)
        _validate(breakpoints, values)
        breakpoints, values = _merge_collinear(breakpoints, values)
        object.__setattr__(self, "breakpoints", breakpoints)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_lifted(cls, points: Sequence[Rational], values: Sequence[Rational],
                    name: Optional[str] = None) -> 'PAMap':
        """Build a map from lifted nodes spanning one period [s, s + 1], 0 <= s < 1."""
        points = [Fraction(p) for p in points]
        values = [Fraction(v) for v in values]
        start = points[0]
        if not 0 <= start < 1 or points[-1] != start + 1:
            raise MapValidationError(
                f"lifted nodes must span [s, s + 1] with 0 <= s < 1, got [{start}, {points[-1]}]")
        if start == 0:
            return cls(points, values, name)
        degree = values[-1] - values[0]
        if 1 not in points:
            i = bisect_right(points, 1)
            x0, x1, v0, v1 = points[i - 1], points[i], values[i - 1], values[i]
            points.insert(i, Fraction(1))
            values.insert(i, v0 + (v1 - v0) * (1 - x0) / (x1 - x0))
        cut = points.index(1)
        head = [(p - 1, v - degree) for p, v in zip(points[cut:], values[cut:])]
        tail = list(zip(points[1:cut + 1], values[1:cut + 1]))
        nodes = head + tail
        return cls([p for p, _ in nodes], [v for _, v in nodes], name)

    @property
    def degree(self) -> int:
        return int(self.values[-1] - self.values[0])

    @property
    def slopes(self) -> Tuple[Fraction, ...]:
        bp, v = self.breakpoints, self.values
        return tuple((v[i + 1] - v[i]) / (bp[i + 1] - bp[i]) for i in range(len(bp) - 1))

    @property
    def min_abs_slope(self) -> Fraction:
        return min(abs(s) for s in self.slopes)

    def segments(self) -> List[Tuple[Fraction, Fraction, Fraction, Fraction]]:
        """(x_i, x_{i+1}, v_i, v_{i+1}) for every affine piece of the stored lifting."""
        bp, v = self.breakpoints, self.values
        return [(bp[i], bp[i + 1], v[i], v[i + 1]) for i in range(len(bp) - 1)]

    def lift_eval(self, x: Rational) -> Fraction:
        x = Fraction(x)
        n = math.floor(x)
        t = x - n
        i = min(bisect_right(self.breakpoints, t) - 1, len(self.breakpoints) - 2)
        x0, x1 = self.breakpoints[i], self.breakpoints[i + 1]
        v0, v1 = self.values[i], self.values[i + 1]
        return v0 + (v1 - v0) * (t - x0) / (x1 - x0) + n * self.degree

    def eval(self, x: PointLike) -> CirclePoint:
        return CirclePoint(self.lift_eval(_as_fraction(x)))

    def branch_count(self) -> int:
        """Upper bound on the number of components of f^-1(A) for an arc A != S1.

        Every component starts where the lifting enters A, and a piece whose
        values span a length L enters a given arc at most ceil(L) times.
        """
        return sum(math.ceil(abs(v1 - v0)) for _, _, v0, v1 in self.segments())

    @cached_property
    def branch_index(self) -> 'BranchIndex':
        return BranchIndex.build(self)

    def __str__(self) -> str:
        label = self.name or "map"
        return f"{label}({len(self.breakpoints) - 1} pieces, degree {self.degree})"


@dataclass(frozen=True)
class Branch:
    x0: Fraction
    v0: Fraction
    inverse_slope: Fraction
    lo: Fraction
    hi: Fraction

    def preimage(self, y: Fraction) -> Fraction:
        return self.x0 + (y - self.v0) * self.inverse_slope


@dataclass(frozen=True)
class BranchIndex:
    """Affine pieces crossing each cell between consecutive values of a map mod 1.

    cells[j] lists the pairs (piece, n) such that the piece takes the values
    y + n for every y strictly inside [cuts[j], cuts[j + 1]].
    """
    branches: Tuple[Branch, ...]
    cuts: Tuple[Fraction, ...]
    cells: Tuple[Tuple[Tuple[int, int], ...], ...]

    @classmethod
    def build(cls, f: 'PAMap') -> 'BranchIndex':
        branches = tuple(Branch(x0, v0, (x1 - x0) / (v1 - v0), min(v0, v1), max(v0, v1))
                         for x0, x1, v0, v1 in f.segments())
        cuts = sorted({Fraction(0)} | {v % 1 for v in f.values})
        cells = []
        for lo_cut, hi_cut in zip(cuts, cuts[1:] + [Fraction(1)]):
            y = (lo_cut + hi_cut) / 2
            cells.append(tuple((i, n) for i, b in enumerate(branches)
                               for n in range(math.ceil(b.lo - y), math.floor(b.hi - y) + 1)))
        return cls(branches, tuple(cuts), tuple(cells))

    def cell_range(self, a: Fraction, b: Fraction) -> range:
        """Indices of the cells meeting the open interval (a, b), 0 <= a < b <= 1."""
        return range(bisect_right(self.cuts, a) - 1, bisect_left(self.cuts, b))

    def around(self, y: Fraction) -> Iterable[Tuple[int, int]]:
        """Pairs (piece, n) whose closed value range contains y + n, 0 <= y < 1."""
        j = bisect_right(self.cuts, y) - 1
        yield from self.cells[j]
        if self.cuts[j] == y:
            # y is a cut: pieces ending at y + n only show up in the cell below
            below = self.cells[j - 1]
            shift = 1 if j == 0 else 0
            yield from ((i, n + shift) for i, n in below)


def _validate(breakpoints: Tuple[Fraction, ...], values: Tuple[Fraction, ...]) -> None:
    if len(breakpoints) != len(values):
        raise MapValidationError(
            f"{len(breakpoints)} breakpoints but {len(values)} values",
            index=min(len(breakpoints), len(values)))
    if len(breakpoints) < 2:
        raise MapValidationError("at least two breakpoints are required", index=len(breakpoints))
    if breakpoints[0] != 0:
        raise MapValidationError(f"first breakpoint must be 0, got {breakpoints[0]}", index=0)
    last = len(breakpoints) - 1
    if breakpoints[-1] != 1:
        raise MapValidationError(f"last breakpoint must be 1, got {breakpoints[-1]}", index=last)
    for i in range(1, len(breakpoints)):
        if breakpoints[i] <= breakpoints[i - 1]:
            raise MapValidationError("breakpoints must be strictly increasing", index=i)
    degree = values[-1] - values[0]
    if degree.denominator != 1:
        raise MapValidationError(f"degree {degree} is not an integer", index=last)
    for i in range(last):
        if values[i + 1] == values[i]:
            raise MapValidationError("zero slope segment", index=i)


def _merge_collinear(breakpoints, values):
    bp, v = [breakpoints[0]], [values[0]]
    for i in range(1, len(breakpoints)):
        if len(bp) >= 2:
            slope_in = (v[-1] - v[-2]) / (bp[-1] - bp[-2])
            slope_out = (values[i] - v[-1]) / (breakpoints[i] - bp[-1])
            if slope_in == slope_out:
                bp.pop()
                v.pop()
        bp.append(breakpoints[i])
        v.append(values[i])
    return tuple(bp), tuple(v)


def rotation_map(alpha: Rational) -> PAMap:
    """The rigid rotation x -> x + alpha."""
    alpha = Fraction(alpha) % 1
    return PAMap((0, 1), (alpha, alpha + 1), name=f"r_{alpha}")


def compose(f: PAMap, g: PAMap) -> PAMap:
    """Exact lifting of f o g."""
    nodes = set(g.breakpoints)
    for x0, x1, v0, v1 in g.segments():
        lo, hi = min(v0, v1), max(v0, v1)
        for n in range(math.floor(lo), math.floor(hi) + 1):
            for b in f.breakpoints[:-1]:
                y = b + n
                if lo < y < hi:
                    nodes.add(x0 + (y - v0) * (x1 - x0) / (v1 - v0))
    points = sorted(nodes)
    values = [f.lift_eval(g.lift_eval(x)) for x in points]
    return PAMap(points, values)


def same_circle_map(f: PAMap, g: PAMap) -> bool:
    """True when f and g agree pointwise on the circle (liftings differ by one integer)."""
    points = sorted(set(f.breakpoints) | set(g.breakpoints))
    shifts = {f.lift_eval(x) - g.lift_eval(x) for x in points}
    return len(shifts) == 1 and next(iter(shifts)).denominator == 1


def _lifted_breakpoints(f: PAMap, a: Fraction, b: Fraction) -> List[Fraction]:
    inner = f.breakpoints[:-1]
    points = []
    for n in range(math.floor(a), math.floor(b) + 1):
        first, last = bisect_right(inner, a - n), bisect_left(inner, b - n)
        points += [x + n for x in inner[first:last]]
    return points


def image_of_arc(f: PAMap, arc: Arc) -> Arc:
    a, b = arc.lifted()
    samples = [f.lift_eval(a), f.lift_eval(b)]
    samples += [f.lift_eval(p) for p in _lifted_breakpoints(f, a, b)]
    lo, hi = min(samples), max(samples)
    if hi - lo >= 1:
        return Arc.full()
    return Arc(CirclePoint(lo), hi - lo)


def arc_orbit(f: PAMap, arc: Arc, max_n: int) -> List[Arc]:
    """[A, f(A), f^2(A), ...] up to max_n images.

    Stops once S1 is reached or an image repeats an earlier arc; the repeated
    arc is the last entry.
    """
    orbit = [arc]
    seen = {arc}
    for _ in range(max_n):
        if orbit[-1].is_full:
            break
        image = image_of_arc(f, orbit[-1])
        orbit.append(image)
        if image in seen:
            break
        seen.add(image)
    return orbit


def preimages(f: PAMap, y: Rational) -> List[Fraction]:
    """Sorted points x in [0, 1) with f(x) = y."""
    y = Fraction(y) % 1
    index = f.branch_index
    found = set()
    for i, n in index.around(y):
        branch = index.branches[i]
        if branch.lo <= y + n <= branch.hi:
            found.add(branch.preimage(y + n) % 1)
    return sorted(found)


def preimage_intervals(f: PAMap, c: Fraction, d: Fraction) -> List[Tuple[Fraction, Fraction]]:
    """Components of f^-1 of the lifted interval [c, d], 0 <= c < 1, as lifted intervals.

    Each component (lo, hi) has 0 <= lo < 1; the full circle is (0, 1).
    """
    if d - c >= 1:
        return [(Fraction(0), Fraction(1))]
    index = f.branch_index
    keys = set()
    for a, b, shift in ((c, min(d, Fraction(1)), 0), (Fraction(0), d - 1, 1)):
        if a < b:
            for j in index.cell_range(a, b):
                keys.update((i, n - shift) for i, n in index.cells[j])
    pieces = []
    for i, n in keys:
        branch = index.branches[i]
        y_lo, y_hi = max(branch.lo, c + n), min(branch.hi, d + n)
        if y_lo < y_hi:
            p, q = branch.preimage(y_lo), branch.preimage(y_hi)
            pieces.append((min(p, q), max(p, q)))
    return _merge_on_circle(pieces)


def preimage_components(f: PAMap, arc: Arc) -> List[Arc]:
    if arc.is_full:
        return [Arc.full()]
    return [Arc(CirclePoint(lo), hi - lo) for lo, hi in preimage_intervals(f, *arc.lifted())]


def _merge_on_circle(pieces: Iterable[Tuple[Fraction, Fraction]]) -> List[Tuple[Fraction, Fraction]]:
    merged: List[List[Fraction]] = []
    for lo, hi in sorted(pieces):
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    if len(merged) > 1 and merged[0][0] == 0 and merged[-1][1] == 1:
        first = merged.pop(0)
        merged[-1][1] = 1 + first[1]
    return [(lo, hi) for lo, hi in merged]


def preimage_spread(f: PAMap, arc: Arc) -> Fraction:
    components = preimage_components(f, arc)
    if not components:
        raise NoComponentError(f"preimage of {arc} has no non-degenerate component")
    if len(components) == 1:
        return Fraction(0)
    return max(arc_distance(a, b) for a, b in combinations(components, 2))


def sup_distance(f: PAMap, g: PAMap) -> Fraction:
    """rho(f, g): sup over the circle of the arc-length distance between f(x) and g(x)."""
    points = sorted(set(f.breakpoints) | set(g.breakpoints))
    diffs = [f.lift_eval(x) - g.lift_eval(x) for x in points]
    best = Fraction(0)
    for d0, d1 in zip(diffs, diffs[1:]):
        lo, hi = min(d0, d1), max(d0, d1)
        # distance to Z peaks at half-integers
        if math.ceil(lo - Fraction(1, 2)) <= math.floor(hi - Fraction(1, 2)):
            return Fraction(1, 2)
        best = max(best, circle_distance(d0, 0), circle_distance(d1, 0))
    return best


def branch_sum(f: PAMap, y: Rational) -> Fraction:
    """Sum of 1/|F'(x)| over the preimages x of y. y must avoid breakpoint images."""
    y = Fraction(y)
    total = Fraction(0)
    for (x0, x1, v0, v1), s in zip(f.segments(), f.slopes):
        lo, hi = min(v0, v1), max(v0, v1)
        for n in range(math.floor(lo - y), math.ceil(hi - y) + 1):
            if lo < y + n < hi:
                total += 1 / abs(s)
    return total


def verify_measure_preserving(f: PAMap) -> MeasureCheck:
    cuts = sorted({v % 1 for v in f.values})
    nxt = cuts[1:] + [cuts[0] + 1]
    for lo, hi in zip(cuts, nxt):
        y = ((lo + hi) / 2) % 1
        total = branch_sum(f, y)
        if total != 1:
            logger.info(f"{f} does not preserve Lebesgue measure: branch sum {total} at y={y}")
            return MeasureCheck(False, y, total)
    logger.debug(f"{f} preserves Lebesgue measure ({len(cuts)} value cells checked)")
    return MeasureCheck(True)


def turning_points(f: PAMap) -> List[TurningPoint]:
    """Interior sign changes of the slope, plus the seam point 0 when it is one."""
    slopes = f.slopes
    found = []
    for i in range(len(slopes)):
        before, after = slopes[i - 1], slopes[i]
        if (before > 0) == (after > 0):
            continue
        kind = "max" if before > 0 else "min"
        found.append(TurningPoint(CirclePoint(f.breakpoints[i]), kind, f.values[i], i))
    return found


def lap_lengths(f: PAMap) -> List[Fraction]:
    points = [tp.point.value for tp in turning_points(f)]
    if not points:
        return [Fraction(1)]
    return [(b - a) % 1 or Fraction(1) for a, b in zip(points, points[1:] + points[:1])]


def critical_data(f: PAMap) -> CriticalData:
    tps = turning_points(f)
    values = tuple(CirclePoint(tp.value) for tp in tps)
    distinct = sorted(set(values))
    kappa = None
    if len(distinct) >= 2:
        kappa = min(circle_distance(u.value, v.value) for u, v in combinations(distinct, 2))
    return CriticalData(
        turning_points=tuple(tp.point for tp in tps),
        critical_values=values,
        kinds=tuple(tp.kind for tp in tps),
        kappa=kappa,
        zeta=min(lap_lengths(f)),
    )
