from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    """Named residuals with a pass threshold; ``extra`` holds non-residual data."""

    residuals: dict[str, float]
    tol: float = 1e-9
    extra: dict = field(default_factory=dict)

    @property
    def max(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max <= self.tol

    def __getitem__(self, key):
        return self.residuals[key]

    def to_dict(self) -> dict:
        out = {"residuals": {k: float(v) for k, v in self.residuals.items()},
               "max": float(self.max), "tol": self.tol, "passed": self.passed}
        out.update(self.extra)
        return out
