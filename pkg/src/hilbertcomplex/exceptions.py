class HilbertComplexError(Exception):
    pass


class ValidationError(HilbertComplexError, ValueError):
    """Malformed input: bad shapes, mismatched modules, invalid descriptors."""


class ComplexPropertyError(HilbertComplexError):
    """A sequence of operators fails ``t_{k+1} t_k = 0`` within tolerance."""

    def __init__(self, k: int, norm: float, bound: float):
        self.k = k
        self.norm = norm
        self.bound = bound
        super().__init__(
            f"complex property violated at k={k}: |t_{k + 1} t_{k}| = {norm:.3e} > {bound:.3e}")


class SingularOperatorError(HilbertComplexError):
    pass


class ExactnessError(HilbertComplexError):
    """A short sequence of chain maps is not exact at some degree."""

    def __init__(self, k: int, message: str):
        self.k = k
        super().__init__(f"sequence not exact at k={k}: {message}")
