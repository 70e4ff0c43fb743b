"""Numerical tolerances shared by the solvers."""

from dataclasses import dataclass, fields, replace
import os

ENV_PREFIX = "MTC_"


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and iteration caps.

    tol_newton : convergence threshold on the (relative) residual of the
        Fermat-leg systems.
    tol_bisect : relative width at which bracketing root searches stop.
    tol_invert : relative tolerance of the curvature inversion, also used
        to snap a total distance onto the semiperimeter / vertex bounds.
    max_iter : Newton iteration cap.
    """

    tol_newton: float = 1e-12
    tol_bisect: float = 1e-12
    tol_invert: float = 1e-9
    max_iter: int = 100

    def __post_init__(self):
        for name in ("tol_newton", "tol_bisect", "tol_invert"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be an integer >= 1, got {self.max_iter!r}")

    def updated(self, **overrides):
        """Return a copy with the non-None overrides applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    @classmethod
    def from_env(cls, environ=None, base=None):
        """Read ``MTC_<FIELD>`` variables (e.g. ``MTC_TOL_NEWTON``)."""
        environ = os.environ if environ is None else environ
        base = base or cls()
        overrides = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is None or raw == "":
                continue
            caster = int if f.name == "max_iter" else float
            try:
                overrides[f.name] = caster(raw)
            except ValueError as exc:
                raise ValueError(f"{ENV_PREFIX}{f.name.upper()}={raw!r}: {exc}") from None
        return replace(base, **overrides)


DEFAULT_CONFIG = SolverConfig()
