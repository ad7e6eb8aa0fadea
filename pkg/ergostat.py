"""Ergodic statistics: Birkhoff averages, exact correlation sums, mixing reports.

Orbit statistics are statistical evidence only. Expanding maps amplify
round-off by about log2(slope) bits per step, so float orbits are shadowed
pseudo-orbits; correlation sums are computed exactly from preimages instead.
"""

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from config import CircleMapConfig, default_config
from errors import BudgetExceededError
from logger import logger
from models import Arc, CirclePoint, MixingReport, ReportRow
from observables import PairFunction, TestFunction, default_battery, dyadic_arcs, product_battery
from pa_map import PAMap, preimage_intervals

CSV_HEADER = ("function", "n", "value", "defect")


@dataclass
class Orbit:
    exact: List[Fraction]
    floats: np.ndarray

    @property
    def exact_steps(self) -> int:
        return len(self.exact)


def _float_step(f: PAMap):
    """Vectorized float64 version of the map on [0, 1)."""
    xs = np.array([float(x) for x in f.breakpoints])
    ys = np.array([float(v) for v in f.values])
    return lambda x: np.mod(np.interp(x, xs, ys), 1.0)


def orbit(f: PAMap, x: CirclePoint, length: int,
          config: CircleMapConfig = default_config) -> Orbit:
    """x, f(x), ..., f^(length-1)(x): exact while denominators fit the budget, float64 after."""
    exact = []
    point = x.value
    while len(exact) < length and point.denominator.bit_length() <= config.rational_budget_bits:
        exact.append(point)
        point = f.lift_eval(point) % 1
    remaining = length - len(exact)
    floats = np.empty(remaining)
    if remaining:
        step = _float_step(f)
        current = np.array([float(point)])
        for k in range(remaining):
            floats[k] = current[0]
            current = step(current)
        logger.debug(f"orbit of {x}: {len(exact)} exact steps, {remaining} in float64")
    return Orbit(exact, floats)


def _values(h: TestFunction, path: Orbit) -> np.ndarray:
    head = np.array([h.evaluate_exact(p) for p in path.exact], dtype=np.float64)
    return np.concatenate([head, h.evaluate(path.floats)])


def orbit_average(h: TestFunction, path: Orbit) -> float:
    return float(np.mean(_values(h, path)))


def product_orbit_average(h: PairFunction, path_x: Orbit, path_y: Orbit) -> float:
    u, v = h.factors()
    return float(np.mean(_values(u, path_x) * _values(v, path_y)))


def birkhoff_average(f: PAMap, h: TestFunction, x: CirclePoint, length: int,
                     config: CircleMapConfig = default_config) -> float:
    if length < 1:
        raise ValueError(f"orbit length must be positive, got {length}")
    return orbit_average(h, orbit(f, x, length, config))


def product_birkhoff(f: PAMap, h: PairFunction, x: CirclePoint, y: CirclePoint, length: int,
                     config: CircleMapConfig = default_config) -> float:
    if length < 1:
        raise ValueError(f"orbit length must be positive, got {length}")
    return product_orbit_average(h, orbit(f, x, length, config), orbit(f, y, length, config))


def _interval_overlap(a0: Fraction, a1: Fraction, b0: Fraction, b1: Fraction) -> Fraction:
    total = Fraction(0)
    for k in (-1, 0, 1):
        total += max(Fraction(0), min(a1, b1 + k) - max(a0, b0 + k))
    return min(total, a1 - a0, b1 - b0)


def arc_overlap(a: Arc, b: Arc) -> Fraction:
    """Exact Lebesgue measure of the intersection of two arcs."""
    return _interval_overlap(*a.lifted(), *b.lifted())


Interval = Tuple[Fraction, Fraction]


def _preimage_levels(f: PAMap, arc: Arc, depth: int,
                     config: CircleMapConfig) -> Iterator[List[Interval]]:
    """Lifted components of f^-n(arc) for n = 0, 1, ..., depth.

    Raises BudgetExceededError before a level whose component bound
    (components so far times f.branch_count()) is over the budget.
    """
    current = [arc.lifted()]
    yield current
    branches = f.branch_count()
    for n in range(1, depth + 1):
        bound = len(current) * branches
        if bound > config.component_budget:
            raise BudgetExceededError(n, bound, config.component_budget)
        current = [piece for c, d in current for piece in preimage_intervals(f, c, d)]
        logger.debug(f"depth {n}: {len(current)} preimage components of {arc}")
        yield current


def _correlation(components: List[Interval], a: Arc, b: Arc) -> Fraction:
    b0, b1 = b.lifted()
    overlap = sum((_interval_overlap(c, d, b0, b1) for c, d in components), Fraction(0))
    return overlap - a.length * b.length


def preimage_arcs(f: PAMap, arc: Arc, n: int,
                  config: CircleMapConfig = default_config) -> List[Arc]:
    """Components of f^-n(arc), iterating one preimage at a time."""
    for components in _preimage_levels(f, arc, n, config):
        pass
    return [Arc(CirclePoint(c), d - c) for c, d in components]


def exact_correlation(f: PAMap, a: Arc, b: Arc, n: int,
                      config: CircleMapConfig = default_config) -> Fraction:
    """lambda(f^-n(A) & B) - lambda(A) lambda(B)."""
    for components in _preimage_levels(f, a, n, config):
        pass
    return _correlation(components, a, b)


def correlation_series(f: PAMap, a: Arc, b: Arc, max_n: int,
                       config: CircleMapConfig = default_config) -> List[Fraction]:
    """exact_correlation(f, a, b, n) for n = 0..max_n from a single preimage sweep."""
    return [_correlation(components, a, b)
            for components in _preimage_levels(f, a, max_n, config)]


def _correlation_series(f: PAMap, a: Arc, targets: Sequence[Arc], depth: int,
                        config: CircleMapConfig) -> Tuple[List[List[Fraction]], int]:
    """Correlations of A against each target for n = 0..depth.

    Returns one series per target and the depth at which the component
    budget was exceeded (-1 when the full depth was reached).
    """
    series: List[List[Fraction]] = [[] for _ in targets]
    try:
        for components in _preimage_levels(f, a, depth, config):
            for values, b in zip(series, targets):
                values.append(_correlation(components, a, b))
    except BudgetExceededError as e:
        logger.warning(f"correlations of {a}: component budget exceeded at depth {e.depth}")
        return series, e.depth
    return series, -1


def _checkpoints(length: int, base: int) -> List[int]:
    points = []
    step = base
    while step < length:
        points.append(step)
        step *= base
    return points + [length]


def _start_points(config: CircleMapConfig) -> Tuple[np.ndarray, np.ndarray]:
    """One independent Philox stream per Monte Carlo start."""
    children = np.random.SeedSequence(config.seed).spawn(config.monte_carlo_starts)
    pairs = np.array([np.random.Generator(np.random.Philox(child)).random(2) for child in children])
    return pairs[:, 0], pairs[:, 1]


def _monte_carlo(f: PAMap, singles: Sequence[TestFunction], pairs: Sequence[PairFunction],
                 config: CircleMapConfig) -> Tuple[List[ReportRow], dict, dict]:
    step = _float_step(f)
    x, y = _start_points(config)
    length = config.birkhoff_length
    checkpoints = _checkpoints(length, config.checkpoint_base)
    single_sums = np.zeros((len(singles), x.size))
    pair_sums = np.zeros((len(pairs), x.size))
    rows: List[ReportRow] = []
    single_defects, pair_defects = {}, {}

    done = 0
    chunk = 1000
    while done < length:
        size = min(chunk, length - done, checkpoints[0] - done)
        xs, ys = np.empty((size, x.size)), np.empty((size, x.size))
        for k in range(size):
            xs[k], ys[k] = x, y
            x, y = step(x), step(y)
        for i, h in enumerate(singles):
            single_sums[i] += h.evaluate(xs).sum(axis=0)
        for i, h in enumerate(pairs):
            u, v = h.factors()
            pair_sums[i] += (u.evaluate(xs) * v.evaluate(ys)).sum(axis=0)
        done += size
        if done == checkpoints[0]:
            checkpoints.pop(0)
            for functions, sums, defects in ((singles, single_sums, single_defects),
                                             (pairs, pair_sums, pair_defects)):
                for h, total in zip(functions, sums):
                    averages = total / done
                    defect = float(np.mean(np.abs(averages - h.integral())))
                    rows.append(ReportRow(h.identifier, done, float(np.mean(averages)), defect))
                    defects[h.identifier] = defect
    return rows, single_defects, pair_defects


def mixing_report(f: PAMap, config: CircleMapConfig = default_config) -> MixingReport:
    name = f.name or "map"
    report = MixingReport(map_name=name, threshold=config.verdict_threshold,
                          length=config.birkhoff_length, starts=config.monte_carlo_starts)

    decayed = True
    arcs = dyadic_arcs()
    for a in arcs:
        all_series, truncated = _correlation_series(f, a, arcs, config.correlation_depth, config)
        for b, series in zip(arcs, all_series):
            label = f"corr{a}|{b}"
            if truncated >= 0:
                report.truncated_at[label] = truncated
            for n, value in enumerate(series):
                report.correlations.append(ReportRow(label, n, value, float(abs(value))))
            tail = [abs(value) for value in series[1:]]
            if not tail or float(min(tail)) >= config.verdict_threshold:
                decayed = False
    report.correlations_decay = decayed

    rows, single_defects, pair_defects = _monte_carlo(
        f, default_battery(config.max_frequency), product_battery(config.max_frequency), config)
    report.birkhoff = rows
    report.final_defects = {**single_defects, **pair_defects}
    report.ergodic_consistent = all(d < config.verdict_threshold for d in single_defects.values())
    report.mixing_consistent = (report.ergodic_consistent and decayed and
                                all(d < config.verdict_threshold for d in pair_defects.values()))
    logger.info(f"mixing report for {name}: ergodic={report.ergodic_consistent} "
                f"mixing={report.mixing_consistent} correlations_decay={decayed}")
    return report


def report_rows(report: MixingReport) -> List[ReportRow]:
    return report.correlations + report.birkhoff


def write_csv(rows: Sequence[ReportRow]) -> str:
    """CSV with header function,n,value,defect; exact values as p/q strings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        value = str(row.value) if isinstance(row.value, Fraction) else repr(row.value)
        writer.writerow((row.function, row.n, value, repr(row.defect)))
    return buffer.getvalue()
