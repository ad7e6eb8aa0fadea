from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from errors import InvalidWindowError

Rational = Union[Fraction, int, str]


@dataclass(frozen=True, order=True)
class CirclePoint:
    """A point of the circle, identified with [0, 1)."""
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value) % 1)

    def __str__(self) -> str:
        return fraction_str(self.value)


@dataclass(frozen=True)
class Arc:
    """Counterclockwise arc {start + t mod 1 : 0 <= t <= length}. length == 1 is the full circle."""
    start: CirclePoint
    length: Fraction

    def __post_init__(self):
        if not isinstance(self.start, CirclePoint):
            object.__setattr__(self, "start", CirclePoint(self.start))
        length = Fraction(self.length)
        if not 0 < length <= 1:
            raise ValueError(f"Arc length must lie in (0, 1], got {length}")
        object.__setattr__(self, "length", length)
        if length == 1:
            object.__setattr__(self, "start", CirclePoint(0))

    @classmethod
    def full(cls) -> 'Arc':
        return cls(CirclePoint(0), Fraction(1))

    @classmethod
    def between(cls, a: Rational, b: Rational) -> 'Arc':
        """Arc running counterclockwise from a to b (distinct points)."""
        a, b = Fraction(a) % 1, Fraction(b) % 1
        if a == b:
            raise ValueError("Arc.between needs two distinct points")
        return cls(CirclePoint(a), (b - a) % 1)

    @property
    def is_full(self) -> bool:
        return self.length == 1

    @property
    def end(self) -> CirclePoint:
        return CirclePoint(self.start.value + self.length)

    def lifted(self) -> Tuple[Fraction, Fraction]:
        """Lifted interval [s, s + length] with s in [0, 1)."""
        s = self.start.value
        return s, s + self.length

    def contains(self, x: Rational) -> bool:
        return (Fraction(x) - self.start.value) % 1 <= self.length

    def __str__(self) -> str:
        if self.is_full:
            return "S1"
        return f"[{self.start}, {self.end}]"


@dataclass(frozen=True)
class TurningPoint:
    point: CirclePoint
    kind: str  # "max" or "min"
    value: Fraction  # lifted critical value F(point)
    index: int  # breakpoint index of the point


@dataclass(frozen=True)
class CriticalData:
    turning_points: Tuple[CirclePoint, ...]
    critical_values: Tuple[CirclePoint, ...]
    kinds: Tuple[str, ...]
    kappa: Optional[Fraction]
    zeta: Fraction

    @property
    def distinct_values(self) -> Tuple[CirclePoint, ...]:
        return tuple(sorted(set(self.critical_values)))

    @property
    def values_distinct(self) -> bool:
        return len(set(self.critical_values)) == len(self.critical_values)


@dataclass(frozen=True)
class MeasureCheck:
    measure_preserving: bool
    witness: Optional[Fraction] = None
    branch_sum: Optional[Fraction] = None


@dataclass(frozen=True)
class WindowSpec:
    """An arc and an odd-length partition of it into consecutive sub-arcs."""
    arc: Arc
    partition: Tuple[Fraction, ...]

    def __post_init__(self):
        partition = tuple(Fraction(p) for p in self.partition)
        object.__setattr__(self, "partition", partition)
        if self.arc.is_full:
            raise InvalidWindowError("window arc must be a proper arc")
        if not partition:
            raise InvalidWindowError("empty partition")
        if len(partition) % 2 == 0:
            raise InvalidWindowError(f"fold count must be odd, got {len(partition)}")
        for i, p in enumerate(partition):
            if p <= 0:
                raise InvalidWindowError(f"partition[{i}] = {p} is not positive")
        if sum(partition) != self.arc.length:
            raise InvalidWindowError(
                f"partition sums to {sum(partition)}, arc length is {self.arc.length}")

    @classmethod
    def regular(cls, arc: Arc, m: int) -> 'WindowSpec':
        if m < 1:
            raise InvalidWindowError(f"fold count must be positive, got {m}")
        return cls(arc, tuple([arc.length / m] * m))

    @property
    def fold_count(self) -> int:
        return len(self.partition)

    @property
    def is_regular(self) -> bool:
        return len(set(self.partition)) == 1


@dataclass(frozen=True)
class RotationPair:
    alpha: CirclePoint
    beta: CirclePoint

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not isinstance(value, CirclePoint):
                object.__setattr__(self, name, CirclePoint(value))


@dataclass(frozen=True)
class Growth:
    full: bool
    ratio: Optional[Fraction] = None


@dataclass(frozen=True)
class LeoCertificate:
    certified: bool
    reason: Optional[str] = None
    kappa: Optional[Fraction] = None
    zeta: Optional[Fraction] = None
    eta: Optional[Fraction] = None
    eta_raw: Optional[Fraction] = None
    xi: Optional[Fraction] = None
    delta_lb: Optional[Fraction] = None
    growth_min: Optional[Fraction] = None  # raw candidate minimum of ratio - 1
    epsilon: Optional[Fraction] = None

    def constants(self) -> Tuple[Optional[Fraction], ...]:
        return (self.kappa, self.zeta, self.eta, self.xi, self.delta_lb, self.epsilon)


@dataclass(frozen=True)
class PeriodicArcWitness:
    arc: Arc
    period: int
    orbit: Tuple[Arc, ...]


@dataclass(frozen=True)
class LeoDecision:
    leo: bool
    witness: Optional[PeriodicArcWitness] = None
    period_bound: int = 0
    exhaustive: bool = True  # False when the caller's bound is below the turning-point count


@dataclass(frozen=True)
class RotationSet:
    # every periodic arc found for each beta, smallest period first
    entries: Tuple[Tuple[CirclePoint, Tuple[PeriodicArcWitness, ...]], ...] = field(default_factory=tuple)
    candidates_checked: int = 0

    @property
    def betas(self) -> Tuple[CirclePoint, ...]:
        return tuple(beta for beta, _ in self.entries)

    def __contains__(self, beta: Rational) -> bool:
        return CirclePoint(beta) in self.betas


# Utility functions for rationals on the circle
def fraction_str(x: Rational) -> str:
    """Exact string form "p/q" (or "p" for integers)."""
    return str(Fraction(x))


def parse_fraction(text: str) -> Fraction:
    """Parse "p/q" or an integer string into a Fraction (no decimal floats)."""
    text = text.strip()
    if not text or any(c in text for c in ".eE"):
        raise ValueError(f"not a rational string: {text!r}")
    return Fraction(text)


def circle_distance(u: Rational, v: Rational) -> Fraction:
    """Arc-length distance min(|u - v|, 1 - |u - v|) on the circle."""
    d = (Fraction(u) - Fraction(v)) % 1
    return min(d, 1 - d)


def arc_distance(a: Arc, b: Arc) -> Fraction:
    """Distance between two disjoint arcs: the shorter of the two gaps."""
    gap_ab = (b.start.value - (a.start.value + a.length)) % 1
    gap_ba = (a.start.value - (b.start.value + b.length)) % 1
    return min(gap_ab, gap_ba)


@dataclass(frozen=True)
class InvariantArcCheck:
    alpha: CirclePoint
    beta: CirclePoint
    conditions_hold: bool
    arc: Arc
    image: Arc

    @property
    def invariant(self) -> bool:
        return self.image == self.arc


@dataclass(frozen=True)
class GrowthStep:
    arc: Arc
    image: Arc
    ratio: Optional[Fraction]  # None once the image is the full circle
    turning_points_inside: int


@dataclass(frozen=True)
class ReportRow:
    """One data point of a mixing report: correlation at depth n, or a Birkhoff checkpoint."""
    function: str
    n: int
    value: Union[Fraction, float]
    defect: float


@dataclass
class MixingReport:
    map_name: str
    correlations: List[ReportRow] = field(default_factory=list)
    birkhoff: List[ReportRow] = field(default_factory=list)
    final_defects: Dict[str, float] = field(default_factory=dict)
    truncated_at: Dict[str, int] = field(default_factory=dict)  # pair -> depth of BUDGET_EXCEEDED
    threshold: float = 0.05
    length: int = 0
    starts: int = 0
    correlations_decay: bool = False
    ergodic_consistent: bool = False
    mixing_consistent: bool = False
