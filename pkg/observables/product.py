from observables.base import PairFunction, TestFunction


class ProductFunction(PairFunction):
    """u(x) * v(y)."""

    def __init__(self, u: TestFunction, v: TestFunction):
        self.u = u
        self.v = v
        self.identifier = f"{u.identifier}x{v.identifier}"

    def factors(self) -> tuple:
        return self.u, self.v
