from fractions import Fraction

import numpy as np
import pytest

from models import Arc, CirclePoint
from observables import (ArcIndicator, ProductFunction, Trig, default_battery, dyadic_arcs,
                         parse_pair_function, parse_test_function, product_battery)

F = Fraction


def test_trig_values():
    x = np.array([0.0, 0.25, 0.5])
    assert np.allclose(Trig("cos", 1).evaluate(x), [1.0, 0.0, -1.0])
    assert np.allclose(Trig("sin", 2).evaluate(x), [0.0, 0.0, 0.0])
    assert Trig("cos", 0).integral() == 1.0
    assert Trig("sin", 3).integral() == 0.0


def test_trig_rejects_bad_arguments():
    with pytest.raises(ValueError):
        Trig("tan", 1)
    with pytest.raises(ValueError):
        Trig("sin", 0)
    with pytest.raises(ValueError):
        Trig("cos", -1)


def test_indicator_wraps_around_zero():
    h = ArcIndicator(Arc(CirclePoint(F(3, 4)), F(1, 2)))
    assert h.evaluate(np.array([0.8, 0.1, 0.5])).tolist() == [1.0, 1.0, 0.0]
    assert h.evaluate_exact(F(1, 4)) == 1.0
    assert h.evaluate_exact(F(1, 4) + F(1, 10**9)) == 0.0
    assert h.integral() == 0.5


def test_product_integral():
    h = ProductFunction(ArcIndicator(dyadic_arcs()[0]), ArcIndicator(dyadic_arcs()[2]))
    assert h.integral() == 0.125
    assert ProductFunction(Trig("cos", 1), Trig("cos", 1)).integral() == 0.0


def test_batteries():
    singles = default_battery(4)
    assert len(singles) == 8 + 3
    assert [h.identifier for h in singles[:2]] == ["cos1", "sin1"]
    pairs = product_battery(2)
    assert len(pairs) == 5
    assert pairs[-1].identifier == "1[0, 1/2]x1[0, 1/2]"


def test_parse_test_function():
    assert parse_test_function("cos3").identifier == "cos3"
    assert parse_test_function(" sin1 ").identifier == "sin1"
    h = parse_test_function("ind:1/4:1/2")
    assert isinstance(h, ArcIndicator)
    assert h.arc == Arc(CirclePoint(F(1, 4)), F(1, 2))
    for text in ("cosine", "ind:1/4", "ind:0.25:1/2", "exp1"):
        with pytest.raises(ValueError):
            parse_test_function(text)


def test_parse_pair_function():
    h = parse_pair_function("cos1*ind:0:1/4")
    u, v = h.factors()
    assert u.identifier == "cos1"
    assert v.integral() == 0.25
    with pytest.raises(ValueError):
        parse_pair_function("cos1")
