"""Parameter assembly, calibration, and the lag-free vector field."""

import math
import warnings

import pytest

from hpaxis import DelayedInputs, ModelParams, calibrate, preset, preset_names, rhs

MEANS = (7.659, 21.0, 3.055, 0.1)
HALF_LIVES = (4.0, 19.9, 76.4)


def literature():
    return calibrate(means=MEANS, half_lives=HALF_LIVES, w4=0.001, xi=0.1)


def test_clearances_from_half_lives():
    p = literature()
    assert p.w1 == pytest.approx(math.log(2.0) / 4.0, rel=1e-15)
    assert p.w2 == pytest.approx(math.log(2.0) / 19.9, rel=1e-15)
    assert p.w3 == pytest.approx(math.log(2.0) / 76.4, rel=1e-15)
    assert p.w4 == 0.001


def test_calibrated_synthesis_rates():
    p = literature()
    assert p.k1 == pytest.approx(8.55261, rel=1e-5)
    assert p.k2 == pytest.approx(0.09753, rel=1e-4)
    assert p.k4 == pytest.approx(0.00092545, rel=1e-5)


def test_k3_is_clearance_times_level_ratio():
    # k3 carries the cross-unit ratio (mcg/dl over pg/ml); the balance
    # w3*m3 = k3*m2 pins it regardless of the unit convention chosen.
    p = literature()
    assert p.k3 == pytest.approx(p.w3 * MEANS[2] / MEANS[1], rel=1e-14)
    assert p.k3 == pytest.approx(0.0013198483150153532, rel=1e-12)


def test_calibration_means_are_fixed_point():
    p = literature()
    m = MEANS
    delayed = DelayedInputs(x3_h31=m[2], x3_h32=m[2], x3_h34=m[2], x1_h1=m[0], x2_h2=m[1])
    assert max(abs(v) for v in rhs(m, delayed, p)) < 1e-10


def test_rhs_components_decouple():
    p = literature()
    delayed = DelayedInputs(x3_h31=1.0, x3_h32=2.0, x3_h34=0.5, x1_h1=3.0, x2_h2=4.0)
    fb = p.feedbacks()
    d = rhs((1.0, 2.0, 3.0, 0.2), delayed, p)
    assert d[0] == pytest.approx(p.k1 * fb.f1(1.0) - p.w1 * 1.0, rel=1e-14)
    assert d[2] == pytest.approx(p.k3 * 4.0 - p.w3 * 3.0, rel=1e-14)
    assert d[3] == pytest.approx(p.k4 * (p.xi + fb.f3(0.2 * 0.5)) - p.w4 * 0.2, rel=1e-14)


def test_derived_constants():
    p = literature()
    d = p.derived()
    assert d.L1 == pytest.approx(p.k1 / p.w1, rel=1e-15)
    assert d.L3 == pytest.approx(20.105334890032768, rel=1e-12)
    assert d.box_bounds(p.xi)[3] == pytest.approx(1.0179952069837856, rel=1e-12)


def test_receptor_ceiling_warning():
    # the literature set has (1+xi)*k4/w4 slightly above 1
    with pytest.warns(UserWarning, match="receptor ceiling"):
        preset("paper-s6")


def test_preset_matches_direct_calibration():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = preset("paper-s6")
    q = literature()
    assert p == q
    assert "paper-s6" in preset_names()


def test_unknown_preset():
    with pytest.raises(KeyError):
        preset("nonesuch")


def test_parameter_validation():
    good = literature()
    with pytest.raises(ValueError):
        ModelParams(k1=0.0, k2=good.k2, k3=good.k3, k4=good.k4,
                    w1=good.w1, w2=good.w2, w3=good.w3, w4=good.w4, xi=good.xi)
    with pytest.raises(ValueError):
        ModelParams(k1=good.k1, k2=good.k2, k3=good.k3, k4=good.k4,
                    w1=good.w1, w2=good.w2, w3=good.w3, w4=-1.0, xi=good.xi)
    with pytest.raises(ValueError):
        calibrate(means=(1.0, -1.0, 1.0, 1.0), half_lives=HALF_LIVES, w4=0.001, xi=0.1)
    with pytest.raises(ValueError):
        calibrate(means=MEANS, half_lives=(4.0, 0.0, 76.4), w4=0.001, xi=0.1)


def test_calibration_runtime():
    import time

    t0 = time.time()
    literature()
    assert time.time() - t0 < 1.0
