import numpy as np
import pytest
from scipy.stats import norm

from dtcpricer.errors import ContourError, ParameterError
from dtcpricer.models import BlackScholes, ComplexStrip, strip_of_analyticity
from dtcpricer.payoffs import (FourierPayoff, TvoCall, VanillaCall, VolatilityCall,
                               fourier_transform)
from dtcpricer.pricer import (MarketState, QuadConfig, activity_vega, delta, gamma, price,
                              price_transform, select_contour)
from dtcpricer.tables import TABLES, TABLE_MODELS, default_models, table_models

MODELS = default_models()
T2 = MarketState(spot=100.0, rate=0.06)


def bs_call(s, k, sigma, tau, r):
    d1 = (np.log(s / k) + (r + 0.5 * sigma**2) * tau) / (sigma * np.sqrt(tau))
    d2 = d1 - sigma * np.sqrt(tau)
    return s * norm.cdf(d1) - k * np.exp(-r * tau) * norm.cdf(d2), d1


def test_select_contour_examples():
    assert select_contour(ComplexStrip(z_lo=1.0), ComplexStrip()) == (1.75, 0.0)
    merton = strip_of_analyticity(MODELS["merton"])
    k1, k2 = select_contour(ComplexStrip(w_lo=0.0), merton)
    assert k1 == 0 and k2 == 0.625 and 0 < k2 < 62.56
    with pytest.raises(ContourError):
        select_contour(ComplexStrip(z_lo=1.0), ComplexStrip(z_lo=-0.5))
    with pytest.raises(ContourError):
        # reflected model strip Im z < 0.5 against payoff Im z > 1
        select_contour(ComplexStrip(z_lo=1.0), ComplexStrip(z_lo=-0.5, z_hi=3.0))


def test_unpriceable_pairs_raise():
    # pure-jump-type squared-jump transforms need Im w >= 0 on the model side
    for name in ("kou", "cgmy"):
        with pytest.raises(ContourError):
            price(MODELS[name], T2, VolatilityCall(0.05, 1.0))


def test_contour_override_validated():
    with pytest.raises(ContourError):
        price(MODELS["bs"], T2, VanillaCall(80, 1.0), QuadConfig(k1=0.9))
    with pytest.raises(ContourError):
        price(MODELS["merton"], T2, VolatilityCall(0.05, 1.0), QuadConfig(k2=-0.1))


def test_black_scholes_vanilla_closed_form():
    exact, _ = bs_call(100, 80, 0.14, 1.0, 0.06)
    r = price(BlackScholes(0.14), T2, VanillaCall(80, 1.0))
    assert abs(r.price - exact) < 1e-8
    assert r.contour == (1.75, 0.0) and r.err_estimate >= 0 and not r.flagged


@pytest.mark.xfail(strict=True, reason="published 24.7627 differs from the exact "
                   "Black-Scholes value 24.75578 by 0.0069")
def test_black_scholes_vanilla_published_value():
    assert price(BlackScholes(0.14), T2, VanillaCall(80, 1.0)).price == pytest.approx(
        24.7627, abs=0.001)


@pytest.mark.xfail(strict=True, reason="published 0.1088 vs computed 0.10836; the "
                   "simulation column of the same table reads 0.1084")
def test_heston_vol_call_published_value():
    r = price(table_models()["heston"], T2, VolatilityCall(0.05, 1.0))
    assert r.price == pytest.approx(0.1088, abs=5e-5)


def test_fang_tvo_published_value():
    r = price(table_models()["fang"], T2, TvoCall(80, 0.1, 1.0))
    assert r.price == pytest.approx(24.0494, rel=0.01)


# Gil-Pelaez probabilities with the rotation-free Heston cf, Merton jumps
# added for Bates, integrated by scipy quad at 1e-12
GIL_PELAEZ = [
    (2, "heston", 25.378309815753752),
    (3, "heston", 10.283721391773106),
    (4, "heston", 4.1263652362851815),
    (6, "bates", 2.728850381682971),
]


@pytest.mark.parametrize("table, name, ref", GIL_PELAEZ)
def test_vanilla_matches_independent_probability_formula(table, name, ref):
    t = TABLES[table]
    mkt = MarketState(t.spot, t.accrued_tv, t.rate, t.t0)
    p = price(table_models()[name], mkt, VanillaCall(t.strike, t.maturity)).price
    assert p == pytest.approx(ref, rel=1e-8)


def test_deterministic_limit():
    r = price(BlackScholes(1e-9), T2, VanillaCall(80, 1.0))
    assert r.price == pytest.approx(100 - 80 * np.exp(-0.06), abs=1e-6)


def test_black_scholes_accrued_variance_oracles():
    # Table 3 setup: t0 = 0.5, t = 4, TV_t0 = 0.018; under Black-Scholes
    # TV_t is deterministic so vol call and TVO have closed forms
    t = TABLES[3]
    sigma, tau = 0.14, t.maturity - t.t0
    mkt = MarketState(t.spot, t.accrued_tv, t.rate, t.t0)
    tv = t.accrued_tv + sigma**2 * tau
    disc = np.exp(-t.rate * tau)
    vol = price(BlackScholes(sigma), mkt, VolatilityCall(0.1, t.maturity)).price
    assert vol == pytest.approx(disc * max(np.sqrt(tv) - 0.1, 0), abs=1e-8)
    call, _ = bs_call(t.spot, t.strike, sigma, tau, t.rate)
    tvo = price(BlackScholes(sigma), mkt, TvoCall(t.strike, 0.1, t.maturity))
    assert tvo.price == pytest.approx(0.1 * np.sqrt(t.maturity / tv) * call, rel=1e-6)


def test_black_scholes_greeks():
    s, k, sig, tau, r = 100.0, 80.0, 0.14, 1.0, 0.06
    _, d1 = bs_call(s, k, sig, tau, r)
    c = VanillaCall(k, tau)
    assert abs(delta(BlackScholes(sig), T2, c).price - norm.cdf(d1)) < 1e-6
    g_exact = norm.pdf(d1) / (s * sig * np.sqrt(tau))
    assert abs(gamma(BlackScholes(sig), T2, c).price - g_exact) < 1e-6


def test_deep_itm_delta():
    r = delta(MODELS["heston"], T2, VanillaCall(1e-3, 1.0))
    assert abs(r.price - 1) < 1e-3


def test_vega_without_state_is_zero():
    r = activity_vega(MODELS["bs"], T2, VanillaCall(80, 1.0), which="v0")
    assert r.price == 0
    with pytest.raises(ValueError):
        activity_vega(MODELS["heston"], T2, VanillaCall(80, 1.0), which="nope")


@pytest.mark.parametrize("name, which, payoff", [
    ("heston", "v0", VanillaCall(80, 1.0)),
    ("heston", "v0", VolatilityCall(0.05, 1.0)),
    ("fang", "lambda0", VanillaCall(80, 1.0)),
    ("fang", "v0", VolatilityCall(0.05, 1.0)),
    ("bates", "v0", VanillaCall(80, 1.0)),
])
def test_vega_loading_matches_finite_difference(name, which, payoff):
    m = table_models()[name]
    a = activity_vega(m, T2, payoff, which=which, method="loading").price
    b = activity_vega(m, T2, payoff, which=which, method="fd").price
    assert abs(a - b) <= 1e-5 * abs(b)


@pytest.mark.parametrize("name", ["bs", "heston", "merton", "bates", "fang", "kou", "cgmy",
                                  "wishart"])
def test_vanilla_contour_invariance(name):
    m = MODELS[name]
    c = VanillaCall(80, 1.0)
    base = price(m, T2, c)
    lo, hi = 1.0, -strip_of_analyticity(m, 1.0).z_lo
    for k1 in (1.3, 2.2, min(3.5, 0.5 * (2.2 + hi))):
        r = price(m, T2, c, QuadConfig(k1=k1))
        assert abs(r.price - base.price) <= 10 * (r.err_estimate + base.err_estimate)


@pytest.mark.parametrize("name", ["bs", "heston", "merton", "bates", "fang", "wishart"])
def test_vol_call_contour_invariance(name):
    m = MODELS[name]
    c = VolatilityCall(0.05, 1.0)
    base = price(m, T2, c)
    for k2 in (0.3, 0.9, 2.0):
        r = price(m, T2, c, QuadConfig(k2=k2))
        assert abs(r.price - base.price) <= 10 * (r.err_estimate + base.err_estimate)


@pytest.mark.parametrize("name", ["bs", "merton"])
def test_tvo_contour_invariance(name):
    m = MODELS[name]
    c = TvoCall(80, 0.1, 1.0)
    base = price(m, T2, c)
    for k1, k2 in ((1.4, 0.4), (2.2, 0.9), (1.8, 1.5)):
        r = price(m, T2, c, QuadConfig(k1=k1, k2=k2))
        assert abs(r.price - base.price) <= 10 * (r.err_estimate + base.err_estimate)


@pytest.mark.parametrize("table", sorted(TABLES))
def test_vanilla_bounds(table):
    t = TABLES[table]
    tau = t.maturity - t.t0
    mkt = MarketState(t.spot, t.accrued_tv, t.rate, t.t0)
    lower = max(0.0, t.spot - t.strike * np.exp(-t.rate * tau))
    for name, m in table_models().items():
        p = price(m, mkt, VanillaCall(t.strike, t.maturity)).price
        assert lower - 1e-9 <= p <= t.spot, name


@pytest.mark.parametrize("name", ["bs", "heston", "merton", "bates", "fang", "wishart"])
def test_vol_call_decreasing_in_strike(name):
    m = MODELS[name]
    p = [price(m, T2, VolatilityCall(q, 1.0)).price for q in (0.05, 0.15, 0.25)]
    assert p[0] > p[1] > p[2] >= 0


def test_tvo_atm_close_to_black_scholes_at_target_vol():
    # fresh start with the Table 4 spot, rate and horizon; forward-ATM strike
    s, r, tau, sbar = 100.0, 0.072, 0.25, 0.1
    h = s * np.exp(r * tau)
    target, _ = bs_call(s, h, sbar, tau, r)
    p = price(MODELS["bs"], MarketState(s, rate=r), TvoCall(h, sbar, tau)).price
    assert abs(p / target - 1) < 0.05


def test_two_dimensional_path_converges_to_one_dimensional():
    # F(x, y) = (e^x - K)^+ exp(-eps^2 y^2 / 2) has transform
    # F^_1(z) * sqrt(2 pi) / eps * exp(-w^2 / (2 eps^2)); as eps -> 0 the
    # double integral must approach the vanilla price with a gap of order eps^2
    m = MODELS["heston"]
    vanilla = fourier_transform(VanillaCall(80, 1.0))
    ref = price(m, T2, VanillaCall(80, 1.0)).price
    gaps = []
    for eps in (4.0, 2.0, 1.0):
        def f(z, w, eps=eps):
            w = np.asarray(w, dtype=complex)
            return vanilla.transform(z) * np.sqrt(2 * np.pi) / eps * np.exp(-w * w / (2 * eps**2))
        fp = FourierPayoff(f, ComplexStrip(z_lo=1.0), "joint")
        r = price_transform(m, T2, fp, 1.0, QuadConfig(rel_tol=1e-7))
        gaps.append(ref - r.price)
    assert gaps[0] > gaps[1] > gaps[2] > 0
    assert gaps[1] / gaps[0] == pytest.approx(0.25, abs=0.03)
    assert gaps[2] / gaps[1] == pytest.approx(0.25, abs=0.03)


def test_market_and_quad_validation():
    with pytest.raises(ParameterError):
        MarketState(spot=0.0)
    with pytest.raises(ParameterError):
        MarketState(spot=100.0, accrued_tv=-0.1)
    with pytest.raises(ParameterError):
        QuadConfig(rel_tol=0.0)
    with pytest.raises(ParameterError):
        price(MODELS["bs"], MarketState(100.0, t0=2.0), VanillaCall(80, 1.0))


def test_price_is_bit_reproducible():
    c = TvoCall(80, 0.1, 1.0)
    a = price(MODELS["merton"], T2, c)
    b = price(MODELS["merton"], T2, c)
    assert a == b


def test_table_models_have_no_missing_cells():
    assert set(table_models()) == set(TABLE_MODELS)
