from abc import ABC, abstractmethod
from fractions import Fraction

import numpy as np


class TestFunction(ABC):
    """Abstract base class for bounded observables on the circle."""

    __test__ = False  # not a pytest class
    identifier: str = "unknown"

    @abstractmethod
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """
        Evaluate the observable on an array of points in [0, 1).

        Args:
            x: Points of the circle as float64

        Returns:
            Array of values, bounded by 1 in absolute value
        """
        pass

    @abstractmethod
    def integral(self) -> float:
        """Exact integral against Lebesgue measure."""
        pass

    def evaluate_exact(self, x: Fraction) -> float:
        """Value at an exact rational point; families with jumps override this."""
        return float(self.evaluate(np.array([float(x)]))[0])

    def __repr__(self) -> str:
        return self.identifier


class PairFunction(ABC):
    """Observable on the torus, evaluated along (f x f)-orbits."""

    __test__ = False
    identifier: str = "unknown"

    @abstractmethod
    def factors(self) -> tuple:
        """(u, v) with h(x, y) = u(x) * v(y)."""
        pass

    def integral(self) -> float:
        u, v = self.factors()
        return u.integral() * v.integral()

    def __repr__(self) -> str:
        return self.identifier
