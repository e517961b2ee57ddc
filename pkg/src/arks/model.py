"""System parameters, derived quantities, and the scenario classifier.

The model couples an organism density u to an attractant v and a repellent w:

    u_t = Δu − χ∇·(u∇v) + ξ∇·(u∇w)
    τ v_t = Δv + αu − βv
    τ w_t = Δw + γu − δw

with zero-flux boundaries.  The combined potential z = ξw − χv turns the two
drifts into the single term ∇·(u∇z); the net repulsion strength ζ = ξγ − χα
and σ = χ(β − δ) govern its dynamics.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import InvalidParameterError

__all__ = [
    "ModelParams",
    "DerivedParams",
    "ScenarioConfig",
    "Scenario",
    "derive",
    "classify_scenario",
]


@dataclass(frozen=True)
class ModelParams:
    chi: float
    xi: float
    alpha: float
    beta: float
    gamma: float
    delta: float
    tau: int

    def __post_init__(self):
        if self.chi < 0 or self.xi < 0:
            raise InvalidParameterError("taxis rates chi, xi must be >= 0")
        for name in ("alpha", "beta", "gamma", "delta"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be > 0")
        if self.tau not in (0, 1):
            raise InvalidParameterError("tau must be 0 (elliptic) or 1 (parabolic)")


@dataclass(frozen=True)
class DerivedParams:
    zeta: float
    sigma: float


def derive(params: ModelParams) -> DerivedParams:
    """zeta = xi*gamma - chi*alpha, sigma = chi*(beta - delta)."""
    return DerivedParams(
        zeta=params.xi * params.gamma - params.chi * params.alpha,
        sigma=params.chi * (params.beta - params.delta),
    )


@dataclass(frozen=True)
class ScenarioConfig:
    """Per-experiment constants feeding the classifier and the decay checks.

    c_s2 stands in for the non-constructive domain constant of the
    parabolic-elliptic smallness condition; it is an experiment knob, not a
    certified value.  u_exponent is the Lebesgue exponent tracked when the
    organism initial datum is a density (2 when it is a pure measure).
    """

    n: int
    m: float
    c_s2: float = 1.0
    r: float = 1.5
    u_exponent: float = 2.0

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise InvalidParameterError("spatial dimension n must be 1, 2 or 3")
        if self.m <= 0:
            raise InvalidParameterError("total mass m must be > 0")
        if self.c_s2 <= 0:
            raise InvalidParameterError("c_s2 must be > 0")
        if not 6.0 / 5.0 < self.r < 2.0:
            raise InvalidParameterError("r must lie in (6/5, 2)")
        if not 1.0 < self.u_exponent <= 2.0:
            raise InvalidParameterError("u_exponent must lie in (1, 2]")


class Scenario(enum.Enum):
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    UNCLASSIFIED = "unclassified"


def classify_scenario(
    params: ModelParams, cfg: ScenarioConfig, has_density: bool
) -> Scenario:
    """Match (tau, n, zeta, data regularity) against the admissible regimes.

    Unclassified is a value, not an error: the solver runs regardless, but
    decay verdicts tied to a scenario are disabled.
    """
    zeta = derive(params).zeta
    if params.tau == 1 and cfg.n == 2 and zeta >= 0:
        return Scenario.S1
    if params.tau == 0 and cfg.n == 2 and zeta >= -cfg.c_s2 / cfg.m:
        return Scenario.S2
    if (
        params.tau == 0
        and cfg.n == 3
        and zeta >= 0
        and has_density
        and 1.0 < cfg.u_exponent < 2.0
    ):
        return Scenario.S3
    return Scenario.UNCLASSIFIED
