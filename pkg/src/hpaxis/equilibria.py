"""Steady states of the feedback cascade and their local linear data.

The four fixed-point conditions reduce to a single scalar equation in
the cortisol level x. Writing g(x) = x / (L3 * f1(x)), which is strictly
increasing, the ACTH balance forces f2(x4 * x) = g(x), so the
cortisol-receptor product is u = f2^-1(g(x)) and the receptor level is
x4 = u / x. Substituting into the receptor balance gives the residual

    R(x) = L4 * (xi + f3(u(x))) - u(x) / x

whose zeros on the feasible interval are exactly the equilibria. R
tends to -inf at the lower end of the interval and to L4 * xi > 0 at
the upper end, so at least one zero always exists; the solver scans a
uniform grid for sign changes and refines each by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .model import DelayedInputs, ModelParams, rhs
from .rootfind import bisect, grow_upper, scan_roots

__all__ = [
    "Equilibrium",
    "EquilibriumSet",
    "FeasibilityError",
    "ExistenceError",
    "residual",
    "feasible_domain",
    "feasible_upper_bound",
    "find_equilibria",
    "drift",
]


class FeasibilityError(ValueError):
    """A cortisol value outside the interval where the reduction is defined."""

    def __init__(self, x: float, message: str):
        self.x = x
        super().__init__(message)


class ExistenceError(RuntimeError):
    """No equilibrium found. The residual's boundary signs make this
    impossible for a correctly evaluated model, so it signals an
    internal inconsistency rather than a property of the inputs."""


@dataclass(frozen=True)
class Equilibrium:
    """One steady state with the coefficients of its linearization.

    ``a`` and ``b`` are the delayed-loop gains (ACTH-suppression loop
    and CRH-suppression loop respectively), ``w4_tilde`` the effective
    receptor clearance after the positive receptor feedback is absorbed;
    all three feed the characteristic-equation analysis. ``r0`` is the
    receptor level x4 (the ratio u/x0 from the reduction).
    """

    label: str
    x1: float
    x2: float
    x3: float
    x4: float
    a: float
    b: float
    w4_tilde: float

    @property
    def x0(self) -> float:
        """Cortisol coordinate, the reduced equation's unknown."""
        return self.x3

    @property
    def r0(self) -> float:
        return self.x4

    def state(self) -> tuple[float, float, float, float]:
        return (self.x1, self.x2, self.x3, self.x4)

    def in_box(self, params: ModelParams, slack: float = 0.0) -> bool:
        """Whether the state lies in the invariant box [0,L1]x..x[0,(1+xi)L4]."""
        bounds = params.derived().box_bounds(params.xi)
        return all(
            -slack <= v <= bound + slack for v, bound in zip(self.state(), bounds)
        )


@dataclass(frozen=True)
class EquilibriumSet:
    """All equilibria of a parameter set, ascending in cortisol.

    Labels rank by descending cortisol: E1 is the highest-cortisol state
    (the normal one under the literature parameters), the last label the
    lowest (the hypocortisolic one). ``degenerate`` lists cortisol values
    where the residual touches zero tangentially; those are excluded
    from the members and from stability analysis.
    """

    members: tuple[Equilibrium, ...]
    degenerate: tuple[float, ...]
    x_low: float
    x_max: float
    grid_points: int

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def by_label(self, label: str) -> Equilibrium:
        for eq in self.members:
            if eq.label == label:
                return eq
        known = ", ".join(eq.label for eq in self.members)
        raise KeyError(f"no equilibrium labeled {label!r} (have: {known})")

    @property
    def highest(self) -> Equilibrium:
        return self.members[-1]

    @property
    def lowest(self) -> Equilibrium:
        return self.members[0]


def feasible_domain(params: ModelParams) -> tuple[float, float]:
    """Interval (x_low, x_max) of cortisol values where the reduction is defined.

    The upper end solves g(x) = 1 (the suppression argument reaches the
    top of f2's range); the lower end solves g(x) = floor(f2) and is 0
    when f2 can be suppressed all the way to 0.
    """
    fb = params.feedbacks()
    L3 = params.derived().L3

    def g(x: float) -> float:
        return x / (L3 * fb.f1(x))

    # g is increasing with g(0+) = 0 and g(L3) = 1/f1(L3) >= 1
    hi = grow_upper(lambda x: g(x) >= 1.0, L3)
    x_max = bisect(lambda x: g(x) - 1.0, 1e-300, hi, xtol=1e-15 * hi)
    floor2 = fb.f2.floor
    if floor2 <= 0.0:
        x_low = 0.0
    else:
        x_low = bisect(lambda x: g(x) - floor2, 1e-300, x_max, xtol=1e-15 * x_max)
    return x_low, x_max


def feasible_upper_bound(params: ModelParams) -> float:
    return feasible_domain(params)[1]


def _reduction(params: ModelParams):
    """Closures (g, u_of, resid) shared by residual evaluation and assembly."""
    fb = params.feedbacks()
    der = params.derived()
    L3, L4 = der.L3, der.L4
    inverse = getattr(fb.f2, "inverse", None)
    if inverse is None:
        from .feedbacks import numeric_inverse

        def inverse(y: float) -> float:
            return numeric_inverse(fb.f2, y)

    def g(x: float) -> float:
        return x / (L3 * fb.f1(x))

    def u_of(x: float) -> float:
        if x <= 0.0:
            raise FeasibilityError(x, f"cortisol value must be positive, got {x}")
        y = g(x)
        if y > 1.0:
            raise FeasibilityError(
                x, f"g({x}) = {y} exceeds 1; value lies above the feasible interval"
            )
        if y <= fb.f2.floor:
            raise FeasibilityError(
                x,
                f"g({x}) = {y} is at or below the suppression floor {fb.f2.floor}; "
                "value lies below the feasible interval",
            )
        return inverse(y)

    def resid(x: float) -> float:
        u = u_of(x)
        return L4 * (params.xi + fb.f3(u)) - u / x

    return g, u_of, resid


def residual(x: float, params: ModelParams) -> float:
    """Scalar equilibrium residual R(x); zeros are steady-state cortisol levels."""
    _, _, resid = _reduction(params)
    return resid(x)


def _assemble(x0: float, params: ModelParams, u: float) -> Equilibrium:
    fb = params.feedbacks()
    der = params.derived()
    r0 = u / x0
    x1 = der.L1 * fb.f1(x0)
    x2 = params.w3 * x0 / params.k3
    # delayed-loop gains and effective receptor clearance
    a = -params.w2 * params.w3 * u * fb.f2.derivative(u) / fb.f2(u)
    b = -params.w1 * params.w2 * params.w3 * x0 * fb.f1.derivative(x0) / fb.f1(x0)
    w4_tilde = params.w4 - params.k4 * x0 * fb.f3.derivative(u)
    return Equilibrium(
        label="", x1=x1, x2=x2, x3=x0, x4=r0, a=a, b=b, w4_tilde=w4_tilde
    )


def _u_parametrized(params: ModelParams, g, x_max: float):
    """Residual and cortisol level parametrized by the loop product u.

    Near the window edges the cortisol coordinate varies by less than
    float spacing while u still moves freely, so edge roots are solved
    in u instead: x(u) inverts the increasing g at f2(u) by bisection,
    and phi(u) is the receptor balance at that point.
    """
    fb = params.feedbacks()
    L4 = params.derived().L4

    def x_of(u: float) -> float:
        y = fb.f2(u)
        lo, hi = 0.0, x_max
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if g(mid) < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def phi(u: float) -> float:
        if u == 0.0:
            return L4 * params.xi
        return L4 * (params.xi + fb.f3(u)) - u / x_of(u)

    return phi, x_of


def _probe_toward(resid, start: float, boundary: float, negative: bool) -> float | None:
    """Point between start and boundary where resid has the wanted sign.

    The residual is guaranteed negative at the lower domain edge and
    positive at the upper one, but the zone carrying that sign can be
    thinner than the scan inset; this walks geometrically into the gap.
    """
    gap = abs(boundary - start)
    for _ in range(200):
        gap *= 0.25
        x = boundary - gap if boundary > start else boundary + gap
        if x == boundary or x == start:
            return None
        try:
            v = resid(x)
        except (FeasibilityError, OverflowError):
            continue
        if v != v:  # NaN from an extreme evaluation; keep shrinking
            continue
        if (v < 0.0) == negative:
            return x
    return None


def find_equilibria(
    params: ModelParams,
    grid_points: int = 10_000,
    xtol_rel: float = 1e-12,
) -> EquilibriumSet:
    """All steady states, by sign-change scan plus bisection refinement.

    The scan covers the feasible cortisol interval with ``grid_points``
    uniform samples, insetting each end by a relative margin where the
    residual diverges or the reduction leaves its domain. Each inset is
    re-probed geometrically when the adjacent scan value contradicts the
    known boundary sign, so crossings hiding inside the insets are still
    caught.
    """
    x_low, x_max = feasible_domain(params)
    g, u_of, resid = _reduction(params)
    width = x_max - x_low
    eps = 1e-9 * width
    lo_in, hi_in = x_low + eps, x_max - eps
    xtol = xtol_rel * x_max
    roots, touches = scan_roots(resid, lo_in, hi_in, grid_points, xtol=xtol)
    pairs = [(x0, u_of(x0)) for x0 in roots]
    # R -> -inf at the lower edge and -> +L4*xi at the upper edge; a scan
    # endpoint with the opposite sign means a crossing inside the inset.
    # xtol 0 lets the refinements run to float exhaustion; the residual
    # is steep near the edges, so every bit of x-resolution matters.
    # When even that fails the root sits closer to the edge than float
    # spacing and the u-parametrized solve takes over.
    if resid(lo_in) > 0.0:
        probe = _probe_toward(resid, lo_in, x_low, negative=True)
        if probe is not None:
            x0 = bisect(resid, probe, lo_in, xtol=0.0)
            pairs.insert(0, (x0, u_of(x0)))
        else:
            phi, x_of = _u_parametrized(params, g, x_max)
            u_edge = u_of(lo_in)
            if phi(u_edge) > 0.0:
                u_far = grow_upper(lambda u: phi(u) < 0.0, 2.0 * max(u_edge, 1.0))
                u_star = bisect(phi, u_edge, u_far, xtol=1e-15 * u_far)
                # x_of and x_low carry independent bisection errors of the
                # same size; clamp so members stay inside the reported window
                pairs.insert(0, (max(x_of(u_star), x_low), u_star))
    if resid(hi_in) < 0.0:
        probe = _probe_toward(resid, hi_in, x_max, negative=False)
        if probe is not None:
            x0 = bisect(resid, hi_in, probe, xtol=0.0)
            pairs.append((x0, u_of(x0)))
        else:
            phi, x_of = _u_parametrized(params, g, x_max)
            u_edge = u_of(hi_in)
            if phi(u_edge) < 0.0:
                u_star = bisect(phi, 0.0, u_edge, xtol=1e-15 * max(u_edge, 1e-300))
                pairs.append((min(x_of(u_star), x_max), u_star))
    if not pairs:
        raise ExistenceError(
            "no equilibrium found; the residual must cross zero on the feasible "
            "interval, so the feedback evaluation is inconsistent"
        )
    assembled = [_assemble(x0, params, u) for x0, u in pairs]
    # rank by descending cortisol for labels, store ascending
    by_desc = sorted(assembled, key=lambda e: -e.x3)
    labeled = {id(eq): f"E{i + 1}" for i, eq in enumerate(by_desc)}
    members = tuple(
        replace(eq, label=labeled[id(eq)])
        for eq in sorted(assembled, key=lambda e: e.x3)
    )
    return EquilibriumSet(
        members=members,
        degenerate=tuple(touches),
        x_low=x_low,
        x_max=x_max,
        grid_points=grid_points,
    )


def drift(eq: Equilibrium, params: ModelParams) -> float:
    """Max-norm of the lag-free vector field at the equilibrium (ideally 0)."""
    delayed = DelayedInputs(
        x3_h31=eq.x3, x3_h32=eq.x3, x3_h34=eq.x3, x1_h1=eq.x1, x2_h2=eq.x2
    )
    return max(abs(v) for v in rhs(eq.state(), delayed, params))
