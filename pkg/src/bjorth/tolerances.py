"""Numerical tolerances used by every certified decision."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

from .errors import ToleranceError


@dataclass(frozen=True)
class Tolerances:
    """Tolerance record attached to every verdict.

    All thresholds are on unit-scale quantities: the predicates normalize
    ``x`` and ``y`` to norm one before deciding.
    """

    eps_zero: float = 1e-9
    eps_eig: float = 1e-9
    tol_sa: float = 1e-8
    grid_points: int = 720
    max_depth: int = 20
    witness_tol: float = 1e-10
    minimize_tol: float = 1e-10

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ToleranceError(f"tolerance {f.name} must be a positive finite number, got {v!r}")
        if self.grid_points < 8:
            raise ToleranceError("grid_points must be at least 8")

    @property
    def inflated(self) -> bool:
        """Thresholds too loose for unit-scale verdicts to mean anything."""
        return max(self.eps_zero, self.eps_eig, self.tol_sa) > 1e-4

    def as_dict(self) -> dict:
        return asdict(self)

    def with_tol(self, tol: float) -> "Tolerances":
        return replace(self, eps_zero=tol)


DEFAULT = Tolerances()
