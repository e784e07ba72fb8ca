"""Core model definition: parameters, calibration, and the vector field.

Four state variables track the stress-hormone cascade: x1 CRH (pg/ml),
x2 ACTH (pg/ml), x3 cortisol (mcg/dl), and x4 the dimensionless
glucocorticoid receptor availability in the pituitary. Synthesis terms
are modulated by saturating feedbacks of cortisol (directly, and through
the cortisol-receptor product x4*x3); each variable clears at a
first-order rate w_i. Delayed influences enter the right-hand side as
externally supplied values so that the same vector field serves both
discrete-lag and distributed-lag integrators.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .feedbacks import InhibitoryHill, StimulatoryHill

__all__ = [
    "ModelParams",
    "DerivedConstants",
    "FeedbackSet",
    "DelayedInputs",
    "calibrate",
    "preset",
    "preset_names",
    "rhs",
]


@dataclass(frozen=True)
class FeedbackSet:
    """The three response functions wired into the vector field.

    f1: cortisol -> CRH synthesis (decreasing)
    f2: cortisol-receptor product -> ACTH synthesis (decreasing)
    f3: cortisol-receptor product -> receptor expression (increasing)
    """

    f1: object
    f2: object
    f3: object


@dataclass(frozen=True)
class DerivedConstants:
    """Synthesis-over-clearance composites bounding the forward cascade."""

    L1: float  # k1/w1, max CRH level
    L2: float  # k1*k2/(w1*w2), max ACTH level
    L3: float  # k1*k2*k3/(w1*w2*w3), max cortisol level
    L4: float  # k4/w4, receptor scale

    def box_bounds(self, xi: float) -> tuple[float, float, float, float]:
        """Upper corners of the positively invariant box for the flow."""
        return (self.L1, self.L2, self.L3, (1.0 + xi) * self.L4)


@dataclass(frozen=True)
class ModelParams:
    # synthesis rates
    k1: float  # pg/(ml*min)
    k2: float  # 1/min
    k3: float  # (mcg/dl)/(pg/ml)/min
    k4: float  # 1/min
    # clearance rates, 1/min
    w1: float
    w2: float
    w3: float
    w4: float
    xi: float  # basal (feedback-independent) fraction of receptor synthesis
    # Hill feedback constants
    eta: float = 1.0  # depth of cortisol->CRH suppression, (0, 1]
    mu: float = 1.0  # depth of cortisol-receptor->ACTH suppression, (0, 1]
    alpha1: float = 4.0
    alpha2: float = 4.0
    alpha3: float = 5.0
    c1: float = 2.0  # mcg/dl
    c2: float = 0.8  # mcg/dl
    c3: float = 0.8  # mcg/dl
    # optional replacement for the Hill defaults; see FeedbackSet
    custom_feedbacks: FeedbackSet | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        for name in ("k1", "k2", "k3", "k4", "w1", "w2", "w3", "w4", "xi"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        # Hill constants are validated by the feedback constructors
        self.feedbacks()
        cap = (1.0 + self.xi) * self.k4 / self.w4
        if cap > 1.0:
            warnings.warn(
                f"receptor ceiling (1+xi)*k4/w4 = {cap:.5f} exceeds 1; "
                "the receptor variable may saturate above its nominal scale",
                stacklevel=2,
            )

    def feedbacks(self) -> FeedbackSet:
        if self.custom_feedbacks is not None:
            return self.custom_feedbacks
        return FeedbackSet(
            f1=InhibitoryHill(self.eta, self.alpha1, self.c1),
            f2=InhibitoryHill(self.mu, self.alpha2, self.c2),
            f3=StimulatoryHill(self.alpha3, self.c3),
        )

    def derived(self) -> DerivedConstants:
        return DerivedConstants(
            L1=self.k1 / self.w1,
            L2=self.k1 * self.k2 / (self.w1 * self.w2),
            L3=self.k1 * self.k2 * self.k3 / (self.w1 * self.w2 * self.w3),
            L4=self.k4 / self.w4,
        )


@dataclass(frozen=True)
class DelayedInputs:
    """Delayed state values entering the vector field, one per pathway.

    x3_h31: cortisol as seen by CRH synthesis
    x3_h32: cortisol as seen by ACTH synthesis (paired with current x4)
    x3_h34: cortisol as seen by receptor expression (paired with current x4)
    x1_h1:  CRH as seen by ACTH synthesis
    x2_h2:  ACTH as seen by cortisol synthesis
    """

    x3_h31: float
    x3_h32: float
    x3_h34: float
    x1_h1: float
    x2_h2: float


def rhs(
    state: tuple[float, float, float, float],
    delayed: DelayedInputs,
    params: ModelParams,
) -> tuple[float, float, float, float]:
    """Time derivative of (x1, x2, x3, x4) given delayed pathway values.

    With every delayed input equal to the corresponding current value
    this is the ordinary (lag-free) vector field.
    """
    x1, x2, x3, x4 = state
    fb = params.feedbacks()
    return (
        params.k1 * fb.f1(delayed.x3_h31) - params.w1 * x1,
        params.k2 * fb.f2(x4 * delayed.x3_h32) * delayed.x1_h1 - params.w2 * x2,
        params.k3 * delayed.x2_h2 - params.w3 * x3,
        params.k4 * (params.xi + fb.f3(x4 * delayed.x3_h34)) - params.w4 * x4,
    )


def calibrate(
    means: tuple[float, float, float, float],
    half_lives: tuple[float, float, float],
    w4: float,
    xi: float,
    eta: float = 1.0,
    mu: float = 1.0,
    alpha1: float = 4.0,
    alpha2: float = 4.0,
    alpha3: float = 5.0,
    c1: float = 2.0,
    c2: float = 0.8,
    c3: float = 0.8,
) -> ModelParams:
    """Recover synthesis rates from observed mean levels and half-lives.

    Clearances come from the plasma half-lives, w_i = ln 2 / T_i for the
    three hormones; the receptor clearance w4 is a direct input. The four
    synthesis rates then follow from requiring the means to be a fixed
    point of the lag-free vector field:

        k1 = w1*m1/f1(m3)        k2 = w2*m2/(f2(m4*m3)*m1)
        k3 = w3*m3/m2            k4 = w4*m4/(xi + f3(m4*m3))

    Note that k3 carries the hormone unit conversion (its numerator is in
    mcg/dl, its denominator in pg/ml), so its numeric value is a factor
    10^3 smaller than it would be in uniform units. The fixed-point
    formula above is authoritative here; quoting k3 without the unit
    conversion inflates it by exactly that factor.
    """
    m1, m2, m3, m4 = means
    if min(means) <= 0.0:
        raise ValueError(f"mean levels must be positive, got {means}")
    if min(half_lives) <= 0.0:
        raise ValueError(f"half-lives must be positive, got {half_lives}")
    w1, w2, w3 = (math.log(2.0) / t for t in half_lives)
    f1 = InhibitoryHill(eta, alpha1, c1)
    f2 = InhibitoryHill(mu, alpha2, c2)
    f3 = StimulatoryHill(alpha3, c3)
    u = m4 * m3
    return ModelParams(
        k1=w1 * m1 / f1(m3),
        k2=w2 * m2 / (f2(u) * m1),
        k3=w3 * m3 / m2,
        k4=w4 * m4 / (xi + f3(u)),
        w1=w1,
        w2=w2,
        w3=w3,
        w4=w4,
        xi=xi,
        eta=eta,
        mu=mu,
        alpha1=alpha1,
        alpha2=alpha2,
        alpha3=alpha3,
        c1=c1,
        c2=c2,
        c3=c3,
    )


def _literature_params() -> ModelParams:
    # mean levels 7.659 / 21 / 3.055 / 0.1, half-lives 4 / 19.9 / 76.4 min
    return calibrate(
        means=(7.659, 21.0, 3.055, 0.1),
        half_lives=(4.0, 19.9, 76.4),
        w4=0.001,
        xi=0.1,
    )


_PARAM_PRESETS = {
    "paper-s6": _literature_params,
}


def preset_names() -> tuple[str, ...]:
    return tuple(sorted(_PARAM_PRESETS))


def preset(name: str) -> ModelParams:
    """Look up a named parameter set.

    "paper-s6" is the literature-calibrated set used throughout the test
    corpus: hormone half-lives 4 / 19.9 / 76.4 min, mean levels
    (7.659, 21, 3.055, 0.1), w4 = 0.001/min, xi = 0.1, and default Hill
    constants. Its receptor ceiling slightly exceeds 1 (1.018), which
    triggers the corresponding warning on construction.
    """
    try:
        build = _PARAM_PRESETS[name]
    except KeyError:
        known = ", ".join(preset_names())
        raise KeyError(f"unknown parameter preset {name!r} (known: {known})") from None
    return build()
