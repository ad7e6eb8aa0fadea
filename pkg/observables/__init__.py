from fractions import Fraction
from typing import List

from models import Arc, CirclePoint, parse_fraction
from observables.base import PairFunction, TestFunction
from observables.indicator import ArcIndicator
from observables.product import ProductFunction
from observables.trig import Trig


def default_battery(max_frequency: int) -> List[TestFunction]:
    """cos/sin of frequency 1..max_frequency plus indicators of dyadic arcs."""
    battery: List[TestFunction] = []
    for m in range(1, max_frequency + 1):
        battery += [Trig("cos", m), Trig("sin", m)]
    battery += [ArcIndicator(arc) for arc in dyadic_arcs()]
    return battery


def product_battery(max_frequency: int) -> List[PairFunction]:
    battery: List[PairFunction] = []
    for m in range(1, max_frequency + 1):
        battery += [ProductFunction(Trig("cos", m), Trig("cos", m)),
                    ProductFunction(Trig("sin", m), Trig("sin", m))]
    half = ArcIndicator(dyadic_arcs()[0])
    battery.append(ProductFunction(half, half))
    return battery


def dyadic_arcs() -> List[Arc]:
    return [Arc(CirclePoint(0), Fraction(1, 2)),
            Arc(CirclePoint(Fraction(1, 4)), Fraction(1, 2)),
            Arc(CirclePoint(0), Fraction(1, 4))]


def parse_test_function(text: str) -> TestFunction:
    """"cos<m>", "sin<m>" or "ind:<start>:<length>" for the indicator of an arc."""
    text = text.strip()
    if text.startswith("ind:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"indicator must be ind:<start>:<length>, got {text!r}")
        return ArcIndicator(Arc(CirclePoint(parse_fraction(parts[1])), parse_fraction(parts[2])))
    for kind in ("cos", "sin"):
        if text.startswith(kind) and text[len(kind):].isdigit():
            return Trig(kind, int(text[len(kind):]))
    raise ValueError(f"unknown test function {text!r}")


def parse_pair_function(text: str) -> PairFunction:
    """Two test functions joined by "*", as in "cos1*cos1"."""
    parts = text.split("*")
    if len(parts) != 2:
        raise ValueError(f"product must be <u>*<v>, got {text!r}")
    return ProductFunction(parse_test_function(parts[0]), parse_test_function(parts[1]))
