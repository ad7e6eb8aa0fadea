from fractions import Fraction

import numpy as np

from models import Arc
from observables.base import TestFunction


class ArcIndicator(TestFunction):
    """Indicator of a closed arc."""

    def __init__(self, arc: Arc):
        self.arc = arc
        self.identifier = f"1{arc}"
        self._start = float(arc.start.value)
        self._length = float(arc.length)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        offset = np.mod(np.asarray(x, dtype=np.float64) - self._start, 1.0)
        return (offset <= self._length).astype(np.float64)

    def evaluate_exact(self, x: Fraction) -> float:
        return 1.0 if self.arc.contains(x) else 0.0

    def integral(self) -> float:
        return float(self.arc.length)
