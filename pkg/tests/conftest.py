from fractions import Fraction

import pytest

from map_catalog import load_builtin
from pa_map import PAMap, rotation_map
from perturb import separate_critical_values


@pytest.fixture
def tent() -> PAMap:
    return load_builtin("tent")


@pytest.fixture
def g() -> PAMap:
    """Slope-5 map of degree 1."""
    return load_builtin("g")


@pytest.fixture
def inv3() -> PAMap:
    """Slope-3 map keeping [0, 1/2] and [1/2, 1] invariant."""
    return load_builtin("inv3")


@pytest.fixture
def c3() -> PAMap:
    """Not measure preserving: branch sum 1/2 on (0, 1/2)."""
    return load_builtin("c3")


@pytest.fixture
def valley() -> PAMap:
    return load_builtin("valley")


@pytest.fixture
def r_third() -> PAMap:
    return rotation_map(Fraction(1, 3))


@pytest.fixture(scope="session")
def separated_g() -> PAMap:
    return separate_critical_values(load_builtin("g"), Fraction(1, 1024))
