"""Saturating feedback response functions.

The model couples its four state variables through three sigmoidal
responses: two inhibitory (cortisol suppressing CRH and ACTH synthesis)
and one stimulatory (cortisol-receptor complex upregulating receptor
expression). All three are Hill-type by default, but any object exposing
the same small interface can be substituted: callable on u >= 0, with a
``derivative`` method, declared ``floor``/``ceiling`` bounds, and (for
the slot that gets inverted during equilibrium reduction) an ``inverse``
method. ``numeric_inverse`` provides a bisection fallback for custom
responses that lack a closed-form inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "InhibitoryHill",
    "StimulatoryHill",
    "numeric_inverse",
]


def _check_nonnegative(u: float) -> None:
    if u < 0.0:
        raise ValueError(f"feedback input must be nonnegative, got {u}")


@dataclass(frozen=True)
class InhibitoryHill:
    """Decreasing Hill response 1 - depth * u^n / (m^n + u^n).

    Maps [0, inf) onto (1 - depth, 1], strictly decreasing. ``depth`` is
    the total suppression at saturation (in (0, 1]), ``exponent`` the
    Hill coefficient n >= 1, ``midpoint`` the half-effect concentration.
    """

    depth: float
    exponent: float
    midpoint: float

    def __post_init__(self) -> None:
        if not 0.0 < self.depth <= 1.0:
            raise ValueError(f"depth must lie in (0, 1], got {self.depth}")
        if self.exponent < 1.0:
            raise ValueError(f"exponent must be >= 1, got {self.exponent}")
        if self.midpoint <= 0.0:
            raise ValueError(f"midpoint must be positive, got {self.midpoint}")

    @property
    def floor(self) -> float:
        """Infimum of the response (approached as u -> inf, never attained)."""
        return 1.0 - self.depth

    @property
    def ceiling(self) -> float:
        return 1.0

    def __call__(self, u: float) -> float:
        _check_nonnegative(u)
        # ratio form above the midpoint keeps u^n from overflowing
        if u > self.midpoint:
            return 1.0 - self.depth / ((self.midpoint / u) ** self.exponent + 1.0)
        un = u**self.exponent
        return 1.0 - self.depth * un / (self.midpoint**self.exponent + un)

    def derivative(self, u: float) -> float:
        _check_nonnegative(u)
        if u > self.midpoint:
            r = (self.midpoint / u) ** self.exponent
            return -self.depth * self.exponent * r / (u * (r + 1.0) ** 2)
        mn = self.midpoint**self.exponent
        un = u**self.exponent
        return -self.depth * self.exponent * mn * u ** (self.exponent - 1.0) / (mn + un) ** 2

    def inverse(self, y: float) -> float:
        """Unique u with f(u) = y, defined for y in (floor, 1]."""
        if not self.floor < y <= 1.0:
            raise ValueError(
                f"inverse argument must lie in ({self.floor}, 1], got {y}"
            )
        if y == 1.0:
            return 0.0
        return self.midpoint * ((1.0 - y) / (y - self.floor)) ** (1.0 / self.exponent)


@dataclass(frozen=True)
class StimulatoryHill:
    """Increasing Hill response u^n / (m^n + u^n), mapping [0, inf) onto [0, 1)."""

    exponent: float
    midpoint: float

    def __post_init__(self) -> None:
        if self.exponent < 1.0:
            raise ValueError(f"exponent must be >= 1, got {self.exponent}")
        if self.midpoint <= 0.0:
            raise ValueError(f"midpoint must be positive, got {self.midpoint}")

    @property
    def floor(self) -> float:
        return 0.0

    @property
    def ceiling(self) -> float:
        """Supremum of the response (approached as u -> inf, never attained)."""
        return 1.0

    def __call__(self, u: float) -> float:
        _check_nonnegative(u)
        # ratio form above the midpoint keeps u^n from overflowing
        if u > self.midpoint:
            return 1.0 / ((self.midpoint / u) ** self.exponent + 1.0)
        un = u**self.exponent
        return un / (self.midpoint**self.exponent + un)

    def derivative(self, u: float) -> float:
        _check_nonnegative(u)
        if u > self.midpoint:
            r = (self.midpoint / u) ** self.exponent
            return self.exponent * r / (u * (r + 1.0) ** 2)
        mn = self.midpoint**self.exponent
        un = u**self.exponent
        return self.exponent * mn * u ** (self.exponent - 1.0) / (mn + un) ** 2


def numeric_inverse(f, y: float, hi_seed: float = 1.0, tol: float = 1e-13) -> float:
    """Invert a strictly decreasing response by bracketing bisection.

    Fallback for custom responses without a closed-form ``inverse``.
    Requires f(0) >= y > floor, where floor is f's infimum (taken from a
    ``floor`` attribute when present, 0 otherwise); the upper bracket is
    grown geometrically from ``hi_seed`` until f(hi) < y.
    """
    floor = getattr(f, "floor", 0.0)
    if not floor < y <= f(0.0):
        raise ValueError(f"inverse argument must lie in ({floor}, {f(0.0)}], got {y}")
    if f(0.0) == y:
        return 0.0
    hi = hi_seed
    for _ in range(200):
        if f(hi) < y:
            break
        hi *= 2.0
    else:
        raise ValueError(f"could not bracket inverse of {y}")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return 0.5 * (lo + hi)
