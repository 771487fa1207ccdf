import numpy as np
import pytest
import scipy.integrate as si
from hypothesis import given, settings
from hypothesis import strategies as st

from dtcpricer.errors import ParameterError
from dtcpricer.payoffs import (TvoCall, VanillaCall, VolatilityCall, fourier_transform,
                               payoff_value)

# QUADPACK warns when it cannot certify 1e-13; the assertions check the result
pytestmark = pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")


def test_payoff_examples():
    assert payoff_value(VanillaCall(80, 1), np.log(100), 0.3) == pytest.approx(20)
    assert payoff_value(VolatilityCall(0.05, 1), 0.0, 0.0064) == pytest.approx(0.03)
    assert payoff_value(TvoCall(80, 0.1, 1), np.log(100), 0.04) == pytest.approx(10)


def test_tvo_zero_variance_convention():
    c = TvoCall(80, 0.1, 1)
    assert payoff_value(c, np.log(70), 0.0) == 0
    assert payoff_value(c, np.log(100), 0.0) == np.inf


def test_payoff_rejects_negative_variance():
    with pytest.raises(ValueError):
        payoff_value(VanillaCall(80, 1), 4.0, -1e-3)


@pytest.mark.parametrize("make", [lambda: VanillaCall(0, 1), lambda: VolatilityCall(-0.1, 1),
                                  lambda: TvoCall(80, 0, 1), lambda: TvoCall(-1, 0.1, 1)])
def test_contract_validation(make):
    with pytest.raises(ParameterError):
        make()


def test_transform_examples():
    assert fourier_transform(VanillaCall(1.0, 1)).transform(2j) == pytest.approx(0.5)
    w = np.array([0.3 + 0.5j, -2.0 + 0.1j, 7.0 + 1.0j])
    s = -1j * w
    expect = np.sqrt(np.pi) / (2 * s**1.5)
    assert np.allclose(fourier_transform(VolatilityCall(0.0, 1)).transform(0, w), expect,
                       rtol=1e-14)
    assert fourier_transform(VanillaCall(80, 1)).dimensionality == "z-only"
    assert fourier_transform(VolatilityCall(0.1, 1)).dimensionality == "w-only"
    assert fourier_transform(TvoCall(80, 0.1, 1)).dimensionality == "joint"


def test_tvo_transform_matches_direct_quadrature():
    h, sbar, t = 80.0, 0.1, 1.0
    z, w = 1.5j, 0.5j
    # e^{izx + iwy} F(x, y) with y = u^2 to remove the 1/sqrt(y) singularity
    lo = np.log(h)

    def g(u, x):
        return np.exp(-1.5 * x - 0.5 * u * u) * sbar * np.sqrt(t) * 2 * (np.exp(x) - h)
    val, err = si.dblquad(g, lo, lo + 40, 0, 14, epsabs=0, epsrel=1e-11)
    got = fourier_transform(TvoCall(h, sbar, t)).transform(z, w)
    assert abs(got.imag) < 1e-12 * abs(got)
    assert abs(got - val) <= 1e-6 * abs(val)


def _invert_line(g, x, k):
    """(1/pi) Re int_0^inf e^{-i(u + ik)x} g(u + ik) du for real-valued
    payoffs, by QUADPACK's Fourier routine."""
    kw = dict(wvar=x, limlst=200, epsabs=1e-13)
    c = si.quad(lambda u: g(u + 1j * k).real, 0, np.inf, weight="cos", **kw)[0]
    s = si.quad(lambda u: g(u + 1j * k).imag, 0, np.inf, weight="sin", **kw)[0]
    return np.exp(k * x) * (c + s) / np.pi


def test_vanilla_inversion_round_trip():
    c = VanillaCall(80, 1)
    ft = fourier_transform(c).transform
    for x in np.log([50.0, 75.0, 85.0, 120.0, 200.0]):
        assert abs(_invert_line(ft, x, 1.6) - payoff_value(c, x, 0.0)) < 1e-6


def test_vol_call_inversion_round_trip():
    c = VolatilityCall(0.15, 1)
    ft = fourier_transform(c).transform
    for y in (0.005, 0.02, 0.03, 0.08, 0.3):
        assert abs(_invert_line(lambda w: ft(0, w), y, 0.6) - payoff_value(c, 0.0, y)) < 1e-6


def test_tvo_inversion_round_trip():
    c = TvoCall(80, 0.2, 2.0)
    ft = fourier_transform(c).transform
    z0, w0 = 1.5j, 0.5j
    # the transform factorizes, so the 2D inverse is a product of two lines
    zs = np.array([0.3 + 1.5j, -4 + 2j])
    ws = np.array([1.0 + 0.5j, -3 + 0.2j])
    assert np.allclose(ft(zs[:, None], ws[None, :]) * ft(z0, w0),
                       ft(zs[:, None], w0) * ft(z0, ws[None, :]), rtol=1e-13)
    base = ft(z0, w0)
    for x, y in [(4.3, 0.04), (4.5, 0.1), (4.8, 0.02), (4.0, 0.3), (5.2, 0.5)]:
        fx = _invert_line(lambda z: ft(z, w0), x, 1.5)
        fy = _invert_line(lambda w: ft(z0, w), y, 0.5)
        assert abs(fx * fy / base - payoff_value(c, x, y)) < 1e-4


@pytest.mark.parametrize("c", [VanillaCall(80, 1), VolatilityCall(0.1, 1), TvoCall(80, 0.1, 1)])
def test_transform_decays_along_contour(c):
    fp = fourier_transform(c)
    u = np.array([10.0, 100.0, 1000.0, 10000.0])
    vals = np.abs(fp.transform(u + 1.5j, u + 0.5j))
    assert np.all(np.diff(vals) < 0) and vals[-1] < 1e-2 * vals[0]


@settings(max_examples=50)
@given(st.floats(0.1, 500), st.floats(0.1, 10), st.floats(-20, 20), st.floats(1.01, 4))
def test_vanilla_strike_homogeneity(k, lam, u, v):
    z = complex(u, v)
    a = fourier_transform(VanillaCall(lam * k, 1)).transform(z)
    b = fourier_transform(VanillaCall(k, 1)).transform(z)
    assert a == pytest.approx(lam ** (1 + 1j * z) * b, rel=1e-12)


def test_strips():
    assert fourier_transform(VanillaCall(80, 1)).strip.z_lo == 1
    s = fourier_transform(TvoCall(80, 0.1, 1)).strip
    assert (s.z_lo, s.w_lo) == (1, 0)
    assert fourier_transform(TvoCall(80, 0.1, 1)).bend_ok
    assert not fourier_transform(VolatilityCall(0.1, 1)).bend_ok
