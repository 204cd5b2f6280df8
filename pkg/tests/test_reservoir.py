"""Ohmic reservoir kernels: spectral density, occupation, one-way rates."""

import numpy as np
import pytest

from driveflux.reservoir import (
    Reservoir,
    bose_occupation,
    ohmic_spectral_density,
    rate_down,
    rate_up,
)

COLD = Reservoir(label="right", temperature=0.4, alpha=0.001, omega_c=10.0)
HOT = Reservoir(label="left", temperature=1.2, alpha=0.001, omega_c=10.0)

RNG = np.random.default_rng(411)


def test_reservoir_validates_label():
    with pytest.raises(ValueError):
        Reservoir(label="top", temperature=1.0, alpha=0.001, omega_c=10.0)


@pytest.mark.parametrize("field", ["temperature", "alpha", "omega_c"])
def test_reservoir_rejects_nonpositive_parameters(field):
    kwargs = dict(label="left", temperature=1.0, alpha=0.001, omega_c=10.0)
    kwargs[field] = 0.0
    with pytest.raises(ValueError):
        Reservoir(**kwargs)


def test_spectral_density_at_cutoff():
    # pi * alpha * omega_c / e, checked against a 50-digit evaluation
    val = ohmic_spectral_density(10.0, COLD)
    np.testing.assert_allclose(val, 0.011557273497909217, rtol=1e-15)


def test_spectral_density_vanishes_at_nonpositive_frequency():
    assert ohmic_spectral_density(0.0, COLD) == 0.0
    assert ohmic_spectral_density(-3.0, COLD) == 0.0
    out = ohmic_spectral_density(np.array([-1.0, 0.0, 1.0]), COLD)
    assert out[0] == 0.0 and out[1] == 0.0 and out[2] > 0.0


def test_bose_occupation_freezes_out():
    # omega/kT = 25 puts the mode deep in the frozen regime
    np.testing.assert_allclose(bose_occupation(10.0, COLD),
                               1.3887943865156896e-11, rtol=1e-13)


def test_bose_occupation_value_one():
    # exp(omega/kT) = 2 exactly when omega = kT ln 2
    omega = COLD.temperature * np.log(2.0)
    np.testing.assert_allclose(bose_occupation(omega, COLD), 1.0, rtol=1e-14)


def test_bose_occupation_rejects_nonpositive_frequency():
    with pytest.raises(ValueError):
        bose_occupation(0.0, COLD)
    with pytest.raises(ValueError):
        bose_occupation(np.array([1.0, -2.0]), COLD)


def test_rates_against_high_precision_reference():
    # omega=1, alpha=0.001, omega_c=10, kT=0.4, frozen from a 50-digit
    # evaluation of the closed form
    np.testing.assert_allclose(rate_down(1.0, COLD), 3.0968342176926730e-3,
                               rtol=1e-15)
    np.testing.assert_allclose(rate_up(1.0, COLD), 2.5420363249774577e-4,
                               rtol=1e-15)


def test_rates_vanish_at_nonpositive_frequency():
    for fn in (rate_down, rate_up):
        assert fn(0.0, COLD) == 0.0
        assert fn(-0.5, HOT) == 0.0
        out = fn(np.array([[-1.0, 0.0], [0.3, 2.0]]), COLD)
        assert out[0, 0] == 0.0 and out[0, 1] == 0.0
        assert out[1, 0] > 0.0 and out[1, 1] > 0.0


def test_detailed_balance_ratio():
    """rate_up / rate_down = exp(-omega/kT) to near machine precision."""
    omega = np.concatenate([np.geomspace(1e-6, 30.0, 200),
                            RNG.uniform(0.01, 5.0, 50)])
    for r in (COLD, HOT):
        ratio = rate_up(omega, r) / rate_down(omega, r)
        np.testing.assert_allclose(ratio, np.exp(-omega / r.temperature),
                                   rtol=1e-12)


def test_detailed_balance_spot_value():
    # omega/kT = 0.7/0.4 = 1.75
    ratio = rate_up(0.7, COLD) / rate_down(0.7, COLD)
    np.testing.assert_allclose(ratio, 0.17377394345044513, rtol=1e-13)


def test_rates_continuous_at_zero_frequency():
    # both one-way rates approach pi * alpha * kT as omega -> 0+
    limit = np.pi * COLD.alpha * COLD.temperature
    np.testing.assert_allclose(rate_down(1e-8, COLD), limit, rtol=1e-7)
    np.testing.assert_allclose(rate_up(1e-8, COLD), limit, rtol=1e-7)


def test_rate_difference_equals_spectral_density():
    # (n+1) - n = 1, so the one-way rate gap is the bare spectral density
    omega = np.linspace(0.05, 8.0, 40)
    gap = rate_down(omega, HOT) - rate_up(omega, HOT)
    np.testing.assert_allclose(gap, ohmic_spectral_density(omega, HOT),
                               rtol=1e-12)


def test_rates_nonnegative_and_scalar_typed():
    omega = RNG.uniform(-2.0, 10.0, 300)
    assert np.all(rate_down(omega, COLD) >= 0.0)
    assert np.all(rate_up(omega, COLD) >= 0.0)
    assert isinstance(rate_down(1.0, COLD), float)
    assert isinstance(rate_up(-1.0, COLD), float)
