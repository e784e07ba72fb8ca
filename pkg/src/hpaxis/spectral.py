"""Local stability and oscillation onset for the linearized cascade.

Around an equilibrium the linearized dynamics factor into four clearance
poles and two delayed feedback loops with gains ``a`` (suppression of
ACTH synthesis by the cortisol-receptor product) and ``b`` (suppression
of CRH synthesis by cortisol). The loop transfer function

    Q(z) = -[a (z+w1)(z+w4) + b (z+w4t)]
           / [(z+w1)(z+w2)(z+w3)(z+w4t)]

carries everything needed here. With no lag, the characteristic
polynomial is the quartic whose Hurwitz test ``stability_report``
evaluates. With a lag kernel whose transform is H, the characteristic
equation closes the loop as 1/H(z) = Q(z), and purely imaginary
solutions z = i*omega mark oscillation onset. |Q(i*omega)| decreases
strictly in omega, so at most one frequency omega0 has |Q| = 1;
discrete lags destabilize at the lag values returned by
``dirac_critical_delays``, Erlang-family kernels at the scale returned
by ``gamma_critical_theta``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .equilibria import Equilibrium
from .model import ModelParams
from .rootfind import bisect, grow_upper

__all__ = [
    "StabilityReport",
    "HopfResult",
    "HopfHypothesisError",
    "NoCrossingError",
    "stability_report",
    "nondelayed_jacobian",
    "nondelayed_eigenvalues",
    "q_function",
    "q_modulus",
    "omega0_solve",
    "dirac_critical_delays",
    "gamma_critical_theta",
]


class HopfHypothesisError(ValueError):
    """The equilibrium violates the inequalities required for onset analysis.

    ``failed`` lists the names of the violated inequalities.
    """

    def __init__(self, failed: list[str]):
        self.failed = tuple(failed)
        super().__init__("hypothesis failed: " + "/".join(failed))


class NoCrossingError(ValueError):
    """No unit-modulus frequency exists (the loop gain stays below 1)."""


@dataclass(frozen=True)
class StabilityReport:
    """Inequality flags, Hurwitz data, and verdicts for one equilibrium.

    I0: positive effective receptor clearance (w4_tilde > 0)
    I1, I2: loop-gain bounds entering the no-lag Hurwitz argument
    I3: strict delay-independent stability bound; I3_bar is its negation
        made non-strict (loop gain reaches 1), the precondition for any
        oscillation onset
    """

    i0: bool
    i1: bool
    i2: bool
    i3: bool
    i3_bar: bool
    c1: float
    c2: float
    c3: float
    c4: float
    discriminant: float
    hurwitz_stable: bool
    delay_independent_stable: bool

    def failed_onset_hypotheses(self) -> list[str]:
        """Names of the onset-analysis inequalities that do not hold."""
        out = []
        if not self.i0:
            out.append("I0")
        if not self.i1:
            out.append("I1")
        if not self.i2:
            out.append("I2")
        if not self.i3_bar:
            out.append("I3_bar")
        return out


def stability_report(eq: Equilibrium, params: ModelParams) -> StabilityReport:
    """Evaluate the inequality set and the quartic Hurwitz test."""
    w1, w2, w3 = params.w1, params.w2, params.w3
    w4 = params.w4
    a, b, w4t = eq.a, eq.b, eq.w4_tilde

    i0 = w4t > 0.0
    i1 = (w1 + w4t) * (w2 + w4t) * (w3 + w4t) >= (w4t - w1) * (w4t - w4) * (
        w1 + w2 + w3 + w4t
    )
    i2 = a * (w1 + w4) + b <= (w1 + w2) * (w2 + w3) * (w1 + w3)
    i3_lhs = a * w4 / w4t + b / w1 if w4t != 0.0 else math.inf
    i3 = i0 and i3_lhs < w2 * w3
    i3_bar = (not i0) or i3_lhs >= w2 * w3

    c1 = w1 + w2 + w3 + w4t
    c2 = w1 * w2 + w2 * w3 + w1 * w3 + (w1 + w2 + w3) * w4t + a
    c3 = w1 * w2 * w3 + (w1 * w2 + w2 * w3 + w1 * w3) * w4t + a * (w1 + w4) + b
    c4 = (w1 * w2 * w3 + b) * w4t + a * w1 * w4
    discriminant = c1 * c2 * c3 - c3 * c3 - c1 * c1 * c4
    hurwitz_stable = c1 > 0.0 and c1 * c2 - c3 > 0.0 and discriminant > 0.0 and c4 > 0.0

    return StabilityReport(
        i0=i0,
        i1=i1,
        i2=i2,
        i3=i3,
        i3_bar=i3_bar,
        c1=c1,
        c2=c2,
        c3=c3,
        c4=c4,
        discriminant=discriminant,
        hurwitz_stable=hurwitz_stable,
        delay_independent_stable=i0 and i3,
    )


def nondelayed_jacobian(eq: Equilibrium, params: ModelParams) -> np.ndarray:
    """Jacobian of the lag-free vector field at the equilibrium.

    Built directly from the feedback derivatives rather than from the
    (a, b, w4_tilde) reduction, so its eigenvalues serve as an
    independent check on the Hurwitz coefficients.
    """
    p = params
    fb = p.feedbacks()
    x0, r0 = eq.x0, eq.r0
    u = x0 * r0
    x1 = eq.x1
    return np.array(
        [
            [-p.w1, 0.0, p.k1 * fb.f1.derivative(x0), 0.0],
            [
                p.k2 * fb.f2(u),
                -p.w2,
                p.k2 * x1 * r0 * fb.f2.derivative(u),
                p.k2 * x1 * x0 * fb.f2.derivative(u),
            ],
            [0.0, p.k3, -p.w3, 0.0],
            [
                0.0,
                0.0,
                p.k4 * r0 * fb.f3.derivative(u),
                p.k4 * x0 * fb.f3.derivative(u) - p.w4,
            ],
        ]
    )


def nondelayed_eigenvalues(eq: Equilibrium, params: ModelParams) -> np.ndarray:
    """Eigenvalues of the lag-free Jacobian (dense solver, unordered)."""
    return np.linalg.eigvals(nondelayed_jacobian(eq, params))


def q_function(omega: float, eq: Equilibrium, params: ModelParams) -> complex:
    """Loop transfer function Q evaluated at z = i*omega."""
    z = 1j * omega
    w1, w2, w3, w4 = params.w1, params.w2, params.w3, params.w4
    a, b, w4t = eq.a, eq.b, eq.w4_tilde
    num = a * (z + w1) * (z + w4) + b * (z + w4t)
    den = (z + w1) * (z + w2) * (z + w3) * (z + w4t)
    return -num / den


def q_modulus(omega: float, eq: Equilibrium, params: ModelParams) -> float:
    """|Q(i*omega)| in closed form (strictly decreasing in omega >= 0)."""
    w1, w2, w3, w4 = params.w1, params.w2, params.w3, params.w4
    a, b, w4t = eq.a, eq.b, eq.w4_tilde
    o2 = omega * omega
    num = (b * w4t + a * w1 * w4 - a * o2) ** 2 + o2 * (a * (w1 + w4) + b) ** 2
    den = (o2 + w1 * w1) * (o2 + w2 * w2) * (o2 + w3 * w3) * (o2 + w4t * w4t)
    return math.sqrt(num / den)


def _require_onset_hypotheses(eq: Equilibrium, params: ModelParams) -> StabilityReport:
    report = stability_report(eq, params)
    failed = report.failed_onset_hypotheses()
    if failed:
        raise HopfHypothesisError(failed)
    return report


def omega0_solve(eq: Equilibrium, params: ModelParams, xtol_rel: float = 1e-12) -> float:
    """The unique frequency with |Q(i*omega0)| = 1.

    Exists exactly when the zero-frequency loop gain is at least 1
    (inequality I3_bar); otherwise ``NoCrossingError`` is raised.
    """
    if q_modulus(0.0, eq, params) < 1.0:
        raise NoCrossingError(
            "loop gain at zero frequency is below 1; no unit-modulus crossing"
        )

    def below(omega: float) -> bool:
        return q_modulus(omega, eq, params) < 1.0

    seed = max(params.w2, 1e-6)
    hi = grow_upper(below, seed)
    return bisect(
        lambda om: q_modulus(om, eq, params) - 1.0, 0.0, hi, xtol=xtol_rel * hi
    )


@dataclass(frozen=True)
class HopfResult:
    """Oscillation-onset data for one equilibrium and one kernel family.

    Dirac results carry the increasing sequence ``taus`` of critical
    lags (stability holds below ``taus[0]``). Erlang/Gamma results carry
    the crossing frequency ``omega_p`` and critical scale ``theta_p``
    for the given ``order``; both are None when no crossing exists, with
    ``note`` explaining. ``residual`` is the characteristic-equation
    defect at the reported crossing.
    """

    family: str
    label: str
    omega0: float
    taus: tuple[float, ...] = ()
    order: int | None = None
    omega_p: float | None = None
    theta_p: float | None = None
    residual: float = math.nan
    note: str = ""

    @property
    def found(self) -> bool:
        return bool(self.taus) or self.theta_p is not None

    @property
    def critical_average_delay(self) -> float:
        """Mean kernel lag at onset: tau_0, or order * theta_p."""
        if self.family == "dirac":
            return self.taus[0]
        if self.theta_p is None:
            raise ValueError("no crossing was found: " + (self.note or "unknown"))
        return self.order * self.theta_p


def dirac_critical_delays(
    eq: Equilibrium,
    params: ModelParams,
    pmax: int = 3,
    xtol_rel: float = 1e-12,
) -> HopfResult:
    """Critical discrete lags where a conjugate root pair reaches the axis.

    The first entry is the onset lag: the equilibrium is stable for lags
    below it and unstable just above. Subsequent entries repeat every
    full phase turn 2*pi/omega0.
    """
    _require_onset_hypotheses(eq, params)
    omega0 = omega0_solve(eq, params, xtol_rel)
    qv = q_function(omega0, eq, params)
    phase = math.atan2(qv.imag, qv.real) % (2.0 * math.pi)
    if qv.imag >= 0.0:
        # same branch as the principal arccos; the two must agree
        alt = math.acos(max(-1.0, min(1.0, qv.real / abs(qv))))
        if abs(phase - alt) > 1e-9:
            raise AssertionError(
                f"phase normalizations disagree: atan2 {phase} vs arccos {alt}"
            )
    taus = tuple((phase + 2.0 * math.pi * k) / omega0 for k in range(pmax + 1))
    residual = abs(cmath.exp(1j * omega0 * taus[0]) - qv)
    return HopfResult(
        family="dirac",
        label=eq.label,
        omega0=omega0,
        taus=taus,
        residual=residual,
    )


def gamma_critical_theta(
    eq: Equilibrium,
    params: ModelParams,
    order: int,
    scan_points: int = 10_000,
    xtol_rel: float = 1e-12,
) -> HopfResult:
    """Critical Erlang scale theta_p for a composite kernel of given order.

    A crossing frequency omega_p must satisfy, writing r = |Q(i*omega)|
    and using the Chebyshev form T_p(x) = cos(p*arccos(x)),

        T_p(r^(-1/p)) = Re Q(i*omega) / r

    on (0, omega0), where r > 1 keeps the arccos argument inside (0, 1).
    The largest such root gives the onset scale
    theta_p = sqrt(r^(2/p) - 1) / omega_p, found by scanning downward
    from omega0 and refining the first bracket by bisection. Stability
    holds for scales below theta_p. Some parameter sets admit no root
    (notably low orders); that outcome is reported in ``note`` rather
    than raised.
    """
    if order < 2:
        raise ValueError(f"order must be >= 2, got {order}")
    _require_onset_hypotheses(eq, params)
    omega0 = omega0_solve(eq, params, xtol_rel)

    def crossing_fn(omega: float) -> float:
        qv = q_function(omega, eq, params)
        r = abs(qv)
        x = min(1.0, r ** (-1.0 / order))
        return math.cos(order * math.acos(x)) - qv.real / r

    top = omega0 * (1.0 - 1e-9)
    bottom = omega0 * 1e-4
    step = (top - bottom) / (scan_points - 1)
    prev_om = top
    prev_f = crossing_fn(top)
    bracket = None
    for i in range(1, scan_points):
        om = top - i * step
        f = crossing_fn(om)
        if prev_f == 0.0:
            bracket = (prev_om, prev_om)
            break
        if f == 0.0 or (f > 0.0) != (prev_f > 0.0):
            bracket = (om, prev_om)
            break
        prev_om, prev_f = om, f
    if bracket is None:
        return HopfResult(
            family="gamma",
            label=eq.label,
            omega0=omega0,
            order=order,
            note=f"no crossing of order {order} in (0, omega0)",
        )
    lo, hi = bracket
    omega_p = lo if lo == hi else bisect(crossing_fn, lo, hi, xtol=xtol_rel * omega0)
    r = abs(q_function(omega_p, eq, params))
    theta_p = math.sqrt(max(0.0, r ** (2.0 / order) - 1.0)) / omega_p
    residual = abs(
        (1j * theta_p * omega_p + 1.0) ** order - q_function(omega_p, eq, params)
    )
    return HopfResult(
        family="gamma",
        label=eq.label,
        omega0=omega0,
        order=order,
        omega_p=omega_p,
        theta_p=theta_p,
        residual=residual,
    )
