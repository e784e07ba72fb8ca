"""Steady-state location, labeling, and linearization constants."""

import dataclasses
import math
import random

import pytest

from hpaxis import FeasibilityError, drift, find_equilibria
from hpaxis.equilibria import feasible_domain, residual
from hpaxis.rootfind import bisect, grow_upper, scan_roots

# cortisol roots of the literature set, ascending (frozen against an
# independent 1e5-point scan with its own bisection refinement)
ROOTS = (1.4606068292600263, 2.9816055875394865, 3.0549999999999953)


def test_three_equilibria(eqset):
    assert len(eqset) == 3
    for eq, expected in zip(eqset, ROOTS):
        assert eq.x3 == pytest.approx(expected, rel=1e-9)
    assert eqset.degenerate == ()


def test_labels_rank_by_descending_cortisol(eqset):
    # storage ascending in x3, labels E1..E3 from the top down
    labels = [eq.label for eq in eqset]
    assert labels == ["E3", "E2", "E1"]
    assert eqset.by_label("E1").x3 == pytest.approx(3.055, rel=1e-9)
    assert eqset.by_label("E3").x3 == pytest.approx(ROOTS[0], rel=1e-9)
    assert eqset.highest.label == "E1"
    assert eqset.lowest.label == "E3"
    with pytest.raises(KeyError):
        eqset.by_label("E9")


def test_full_state_components(eqset):
    e1 = eqset.by_label("E1")
    assert e1.state() == pytest.approx((7.659, 21.0, 3.055, 0.1), rel=1e-9)
    e3 = eqset.by_label("E3")
    assert e3.state() == pytest.approx(
        (38.42505276475102, 10.04017787707383, 1.4606068292600263, 0.9670208256206464),
        rel=1e-9,
    )
    e2 = eqset.by_label("E2")
    assert e2.state() == pytest.approx(
        (8.309698234633435, 20.49548849045146, 2.9816055875394865, 0.16273063588870637),
        rel=1e-9,
    )


def test_linearization_constants(eqset):
    e1 = eqset.by_label("E1")
    assert e1.a == pytest.approx(2.63214938683609e-05, rel=1e-9)
    assert e1.b == pytest.approx(0.000185051914191127, rel=1e-9)
    assert e1.w4_tilde == pytest.approx(0.0006302536278060918, rel=1e-9)
    e3 = eqset.by_label("E3")
    assert e3.a == pytest.approx(0.001146098649782337, rel=1e-9)
    assert e3.b == pytest.approx(4.850923593869496e-05, rel=1e-9)
    assert e3.w4_tilde == pytest.approx(0.0007509532424773345, rel=1e-9)
    # the middle state flips the sign of the effective receptor clearance
    assert eqset.by_label("E2").w4_tilde == pytest.approx(-0.0009929492485792916, rel=1e-9)


def test_zero_drift_and_box_membership(params, eqset):
    for eq in eqset:
        assert drift(eq, params) < 1e-9
        assert eq.in_box(params)


def test_residual_signs_around_roots(params, eqset):
    # refinement stops at a relative x-tolerance of 1e-12, so the
    # residual itself lands within slope * tolerance of zero
    for eq in eqset:
        assert abs(residual(eq.x3, params)) < 1e-10
    # transversal crossings: opposite residual signs just left and right
    for eq in eqset:
        left = residual(eq.x3 * (1.0 - 1e-4), params)
        right = residual(eq.x3 * (1.0 + 1e-4), params)
        assert (left > 0.0) != (right > 0.0)


def test_feasible_domain(params, eqset):
    lo, hi = feasible_domain(params)
    assert lo == 0.0  # full suppression depth drives the floor to zero
    assert hi == pytest.approx(3.069698137879869, rel=1e-9)
    assert eqset.x_low == lo and eqset.x_max == hi
    assert all(lo < eq.x3 < hi for eq in eqset)


def test_residual_outside_domain_raises(params):
    lo, hi = feasible_domain(params)
    with pytest.raises(FeasibilityError) as exc:
        residual(hi * 1.01, params)
    assert exc.value.x == pytest.approx(hi * 1.01)
    with pytest.raises(FeasibilityError):
        residual(0.0, params)
    with pytest.raises(FeasibilityError):
        residual(-1.0, params)


def test_partial_suppression_shrinks_domain(params):
    # with mu < 1 the suppression floor is positive, so the window
    # acquires a positive lower edge as well
    pm = dataclasses.replace(params, mu=0.5)
    lo, hi = feasible_domain(pm)
    assert lo > 0.0
    with pytest.raises(FeasibilityError):
        residual(lo * 0.5, pm)


def test_shallow_acth_suppression_keeps_three_states(params):
    # near-flat ACTH suppression squeezes the feasible window but the
    # three crossings persist inside it (confirmed by an independent
    # 1e5-point scan); the receptor loop, not the suppression depth,
    # drives the multiplicity
    pm = dataclasses.replace(params, mu=0.05)
    eqs = find_equilibria(pm)
    assert len(eqs) == 3
    expected = (3.0340995708, 3.0659448003, 3.0689485257)
    for eq, x in zip(eqs, expected):
        assert eq.x3 == pytest.approx(x, rel=1e-6)


def test_weaker_receptor_feedback_single_state(params):
    # raising the receptor half-saturation tames the positive loop and
    # collapses the count to one (confirmed by an independent 3e5-point
    # scan with separate bisection: single crossing at 3.058804945)
    ps = dataclasses.replace(params, c3=2.0)
    eqs = find_equilibria(ps)
    assert len(eqs) == 1
    assert eqs.highest.x3 == pytest.approx(3.058804945, rel=1e-8)
    assert eqs.highest.label == "E1"


@pytest.mark.filterwarnings("ignore:receptor ceiling")
def test_random_existence():
    # at least one steady state must exist for any admissible parameters
    rng = random.Random(2024)
    found = 0
    for _ in range(60):
        from hpaxis import ModelParams

        p = ModelParams(
            k1=math.exp(rng.uniform(-1.0, 3.0)),
            k2=math.exp(rng.uniform(-4.0, 0.0)),
            k3=math.exp(rng.uniform(-8.0, -4.0)),
            k4=math.exp(rng.uniform(-8.0, -4.0)),
            w1=math.exp(rng.uniform(-3.0, -1.0)),
            w2=math.exp(rng.uniform(-4.0, -2.0)),
            w3=math.exp(rng.uniform(-6.0, -3.0)),
            w4=math.exp(rng.uniform(-8.0, -5.0)),
            xi=rng.uniform(0.02, 0.5),
            eta=rng.uniform(0.3, 1.0),
            mu=rng.uniform(0.3, 1.0),
            alpha1=rng.uniform(1.0, 6.0),
            alpha2=rng.uniform(1.0, 6.0),
            alpha3=rng.uniform(1.0, 6.0),
            c1=math.exp(rng.uniform(-1.0, 1.5)),
            c2=math.exp(rng.uniform(-1.5, 0.5)),
            c3=math.exp(rng.uniform(-1.5, 0.5)),
        )
        eqs = find_equilibria(p, grid_points=2000)
        assert len(eqs) >= 1
        lo, hi = eqs.x_low, eqs.x_max
        for eq in eqs:
            # edge-collapsed roots may sit exactly on a window edge
            assert lo <= eq.x3 <= hi
            # roots hugging a window edge sit where the residual slope
            # blows up, so their drift is limited by float resolution;
            # hold only interior roots to a tight bound
            if min(eq.x3 - lo, hi - eq.x3) > 1e-8 * (hi - lo):
                assert drift(eq, p) < 1e-6 * max(1.0, p.k1)
        found += len(eqs)
    assert found >= 60


def test_scan_roots_separates_tangencies():
    # (x-1)^2 (x-2): a touch at 1, a crossing at 2
    roots, touches = scan_roots(lambda x: (x - 1.0) ** 2 * (x - 2.0), 0.0, 3.0, 301, 1e-12)
    assert touches == [1.0]
    assert len(roots) == 1
    assert roots[0] == pytest.approx(2.0, abs=1e-10)


def test_bisect_and_grow_upper():
    root = bisect(lambda x: x * x - 2.0, 0.0, 2.0, xtol=1e-14)
    assert root == pytest.approx(math.sqrt(2.0), abs=1e-12)
    with pytest.raises(ValueError):
        bisect(lambda x: x * x + 1.0, 0.0, 2.0, xtol=1e-14)
    hi = grow_upper(lambda x: x * x > 50.0, 1.0)
    assert hi == 8.0  # 1 -> 2 -> 4 -> 8, first value past sqrt(50)
