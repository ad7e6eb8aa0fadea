import numpy as np

from observables.base import TestFunction


class Trig(TestFunction):
    """cos(2 pi m x) or sin(2 pi m x); cos with m = 0 is the constant 1."""

    def __init__(self, kind: str, m: int):
        if kind not in ("cos", "sin"):
            raise ValueError(f"Unknown trigonometric kind: {kind}")
        if m < 0 or (kind == "sin" and m == 0):
            raise ValueError(f"Invalid frequency {m} for {kind}")
        self.kind = kind
        self.m = m
        self.identifier = f"{kind}{m}"

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        phase = 2 * np.pi * self.m * np.asarray(x, dtype=np.float64)
        return np.cos(phase) if self.kind == "cos" else np.sin(phase)

    def integral(self) -> float:
        return 1.0 if self.kind == "cos" and self.m == 0 else 0.0
