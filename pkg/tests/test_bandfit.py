import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quon.bandfit import (
    BandData, BandFormatError, BoundaryWarning, DEMO_A_KEV, DEMO_Q,
    fit_band, format_band_csv, load_demo_band, optimal_A_given_q,
    parse_band_csv, rigid_refit, synthetic_band,
)
from quon.models import RotorConfig, rotor_energy

EVEN = tuple(range(2, 26, 2))


def test_optimal_A_exact_linear_recovery():
    band = BandData(EVEN, tuple(7.0 * l * (l + 1) for l in EVEN))
    A, sse = optimal_A_given_q(band, 1.0)
    assert A == pytest.approx(7.0) and sse == pytest.approx(0.0, abs=1e-18)


def test_optimal_A_single_level():
    band = BandData.__new__(BandData)
    object.__setattr__(band, "l", (2,))
    object.__setattr__(band, "energy", (6.0,))
    object.__setattr__(band, "weight", (1.0,))
    assert optimal_A_given_q(band, 1.0)[0] == pytest.approx(1.0)


def test_optimal_A_on_noiseless_synthetic():
    band = BandData(EVEN, tuple(rotor_energy(l, RotorConfig(0.985, 4.2)) for l in EVEN))
    A, sse = optimal_A_given_q(band, 0.985)
    assert A == pytest.approx(4.2, rel=1e-12) and sse < 1e-18


def test_round_trip_paper_q():
    band = synthetic_band(7.156, DEMO_Q, EVEN)
    res = fit_band(band)
    assert abs(res.q - DEMO_Q) < 1e-4
    assert abs(res.A - 7.156) / 7.156 < 1e-3
    assert not res.at_boundary
    assert res.rms_residual >= 0


@settings(max_examples=15, deadline=None)
@given(st.floats(0.97, 0.999), st.floats(1.0, 50.0))
def test_round_trip_identifiability(q0, A0):
    res = fit_band(synthetic_band(A0, q0, EVEN))
    assert abs(res.q - q0) < 1e-4
    assert abs(res.A - A0) / A0 < 1e-3


def test_residual_optimality():
    rng = np.random.default_rng(5)
    base = synthetic_band(7.0, 0.993, EVEN)
    noisy = BandData(base.l, tuple(e + rng.normal(0, 2.0) for e in base.energy))
    res = fit_band(noisy)
    best = optimal_A_given_q(noisy, res.q)[1]
    for dq in (-1e-3, 1e-3):
        assert optimal_A_given_q(noisy, res.q + dq)[1] >= best


@pytest.mark.parametrize("c", [0.01, 3.0, 250.0])
def test_scale_covariance(c):
    rng = np.random.default_rng(1)
    base = synthetic_band(6.0, 0.99, EVEN)
    band = BandData(base.l, tuple(e + rng.normal(0, 1.0) for e in base.energy))
    scaled = BandData(band.l, tuple(c * e for e in band.energy))
    r1, r2 = fit_band(band), fit_band(scaled)
    assert r2.q == pytest.approx(r1.q, abs=1e-7)
    assert r2.A == pytest.approx(c * r1.A, rel=1e-6)


def test_rigid_band_hits_boundary():
    band = BandData((2, 4, 6), (6.0, 20.0, 42.0))
    with pytest.warns(BoundaryWarning):
        res = fit_band(band)
    assert res.q == 1.0 and res.at_boundary
    assert res.A == pytest.approx(1.0)


def test_invalid_bands():
    with pytest.raises(BandFormatError):
        BandData((0,), (0.0,))
    with pytest.raises(BandFormatError):
        BandData((4, 2), (1.0, 2.0))
    with pytest.raises(BandFormatError):
        BandData((0, 2, 4), (1.0, 2.0, 3.0))
    with pytest.raises(BandFormatError):
        BandData((2, 4), (1.0,))


def test_weights_change_the_objective():
    band = BandData((2, 4, 6), (6.0, 20.0, 50.0), (1.0, 1.0, 0.0))
    A, sse = optimal_A_given_q(band, 1.0)
    assert A == pytest.approx(1.0) and sse == pytest.approx(0.0, abs=1e-20)


def test_parse_csv():
    text = "# comment\nl,energy_kev,weight\n0,0,1\n2,42.8,1\n4,141.7,0.5\n"
    band = parse_band_csv(text)
    assert band.l == (0, 2, 4) and band.weight == (1.0, 1.0, 0.5)
    assert parse_band_csv("l,energy\n2,6\n4,20\n").energy == (6.0, 20.0)


@pytest.mark.parametrize("text", ["", "# only comments\n", "l,e\n2,6\n4,20\n",
                                  "l,energy_kev\n2,abc\n4,20\n", "l,energy_kev\n2.5,6\n4,20\n",
                                  "l,energy_kev\n2,6,1\n4,20\n"])
def test_parse_csv_errors(text):
    with pytest.raises(BandFormatError):
        parse_band_csv(text)


def test_format_round_trip():
    band = synthetic_band(7.0, 0.99, EVEN)
    again = parse_band_csv(format_band_csv(band, "synthetic"))
    assert again.l == band.l
    np.testing.assert_allclose(again.energy, band.energy, rtol=1e-9)


def test_demo_band_is_synthetic_generator_output():
    band = load_demo_band()
    ref = synthetic_band(DEMO_A_KEV, DEMO_Q, band.l)
    np.testing.assert_allclose(band.energy, ref.energy, rtol=1e-9)
    assert abs(fit_band(band).q - DEMO_Q) < 1e-4


def test_rigid_refit():
    A, energies = rigid_refit(BandData((2, 4), (6.0, 20.0)))
    assert A == pytest.approx(1.0) and energies == (6.0, 20.0)


def test_thread_count_does_not_change_result():
    band = load_demo_band()
    assert fit_band(band, threads=1) == fit_band(band, threads=4)


def test_negative_interval():
    band = synthetic_band(5.0, -0.3, (2, 4, 6, 8))
    res = fit_band(band, (-1.0, 1.0))
    assert res.q == pytest.approx(-0.3, abs=1e-6)
