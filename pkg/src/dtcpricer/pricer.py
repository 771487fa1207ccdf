"""Inverse-Fourier valuation of contracts on (log S_t, TV_t) and the
sensitivity integrals (Delta, Gamma, activity-rate vega).

With z = x + i k1 and w on a contour with Im w = k2 at the origin,

    V = e^{-r tau} / (4 pi^2) int int e^{-i w TV_t0} e^{-i z (log S + r tau)}
        Phi(-z, -w) F^(z, w) dz dw,

and the 1-D reductions (prefactor 1/(2 pi)) when the payoff depends on one
coordinate only.  The integrand g satisfies g(-conj z, -conj w) = conj g, so
real prices are 2 Re of the integral over half the range.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ContourError, ParameterError
from .levy_core import NormalJumps
from .models import (Bates, ComplexStrip, Fang, Heston, Kou, Merton, STATE_NAMES, WishartDtc,
                     cf, cf_with_loading, strip_of_analyticity)
from .payoffs import FourierPayoff, fourier_transform
from .quadrature import integrate_halfline


@dataclass(frozen=True)
class MarketState:
    spot: float
    accrued_tv: float = 0.0
    rate: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        if not self.spot > 0:
            raise ParameterError("spot must be positive")
        if not self.accrued_tv >= 0:
            raise ParameterError("accrued total variance must be nonnegative")


@dataclass(frozen=True)
class QuadConfig:
    """rel_tol=None picks 1e-8 for single and 1e-6 for double integrals.
    w_bend is the angle by which the w-contour of bend-tolerant joint
    payoffs is rotated into the lower half plane away from its origin."""
    rel_tol: Optional[float] = None
    trunc_threshold: float = 1e-12
    max_evals: int = 1_000_000
    k1: Optional[float] = None
    k2: Optional[float] = None
    w_bend: float = np.pi / 4

    def __post_init__(self):
        if self.rel_tol is not None and not self.rel_tol > 0:
            raise ParameterError("rel_tol must be positive")
        if not 0 <= self.w_bend < np.pi / 2:
            raise ParameterError("w_bend must lie in [0, pi/2)")


@dataclass(frozen=True)
class PricingResult:
    price: float
    err_estimate: float
    evals: int
    contour: tuple
    flagged: bool = False   # budget exhausted before the tolerance was met


# ---------------------------------------------------------------------------
# contour

_K1_WINDOW = (1.0, 2.5)
_K1_CLAMP = (1.25, 2.5)
_K2_WINDOW = (0.25, 1.0)


def _pick(lo, hi, window, clamp=None, name="k"):
    if not lo < hi:
        raise ContourError(f"empty admissible interval for {name}: ({lo:g}, {hi:g})")
    a, b = max(lo, window[0]), min(hi, window[1])
    if a < b:
        k = 0.5 * (a + b)
    elif np.isfinite(hi):
        k = 0.5 * (lo + hi)
    else:
        k = lo + 0.5 * (window[1] - window[0])
    if clamp is not None:
        c = min(max(k, clamp[0]), clamp[1])
        if lo < c < hi:
            k = c
    return float(k)


def _admissible(payoff_strip: ComplexStrip, model_strip: ComplexStrip):
    """[(name, lo, hi, used)] for k1 and k2: the open interval where the
    payoff strip meets the reflected model strip (Phi is evaluated at
    (-z, -w)).  used is False for a coordinate the payoff ignores."""
    out = []
    for name, plo, phi_, mlo, mhi in (
            ("k1", payoff_strip.z_lo, payoff_strip.z_hi, model_strip.z_lo, model_strip.z_hi),
            ("k2", payoff_strip.w_lo, payoff_strip.w_hi, model_strip.w_lo, model_strip.w_hi)):
        used = not (np.isinf(plo) and np.isinf(phi_))
        out.append((name, max(plo, -mhi), min(phi_, -mlo), used, (plo, phi_), (-mhi, -mlo)))
    return out


def select_contour(payoff_strip: ComplexStrip, model_strip: ComplexStrip):
    """(k1, k2) strictly inside Sigma_F and the reflected model strip.  A
    coordinate the payoff does not depend on is set to 0."""
    out = []
    windows = {"k1": (_K1_WINDOW, _K1_CLAMP), "k2": (_K2_WINDOW, None)}
    for name, lo, hi, used, pay, mod in _admissible(payoff_strip, model_strip):
        if not used:
            if not lo <= 0 <= hi:   # real argument: the closed strip suffices
                raise ContourError(f"{name} = 0 outside the model strip")
            out.append(0.0)
        elif not lo < hi:
            raise ContourError(
                f"empty admissible interval for {name}: payoff needs ({pay[0]:g}, {pay[1]:g}), "
                f"model allows ({mod[0]:g}, {mod[1]:g}) after reflection")
        else:
            out.append(_pick(lo, hi, *windows[name], name))
    return tuple(out)


def _contour_for(model, tau, fp: FourierPayoff, cfg: QuadConfig):
    model_strip = strip_of_analyticity(model, tau)
    k = list(select_contour(fp.strip, model_strip))
    for i, (name, lo, hi, used, _, _) in enumerate(_admissible(fp.strip, model_strip)):
        override = cfg.k1 if i == 0 else cfg.k2
        if override is None:
            continue
        override = float(override)
        if used and not lo < override < hi:
            raise ContourError(f"{name} = {override:g} outside the admissible interval "
                               f"({lo:g}, {hi:g})")
        k[i] = override if used else k[i]
    return tuple(k)


# ---------------------------------------------------------------------------
# integrals

def _tau(mkt: MarketState, maturity: float) -> float:
    tau = maturity - mkt.t0
    if not tau > 0:
        raise ParameterError("contract maturity must exceed t0")
    return tau


def _phi_kernel(model, tau, z, w, which):
    """Phi(-z, -w), or its derivative -A Phi in the named initial state."""
    if which is None:
        return np.asarray(cf(model, tau, -z, -w))
    phi, a = cf_with_loading(model, tau, -z, -w, which)
    return -a * phi


def _integrand(model, mkt, tau, fp, z, w, extra=None, which=None):
    shift = np.log(mkt.spot) + mkt.rate * tau
    g = np.exp(-1j * w * mkt.accrued_tv - 1j * z * shift) * _phi_kernel(model, tau, z, w, which)
    g = g * fp.transform(z, w)
    if extra is not None:
        g = g * extra(z)
    return g


def _run(model, mkt, tau, fp: FourierPayoff, cfg: QuadConfig, extra=None, which=None):
    """Discounted inversion integral of fp (optionally times extra(z) and
    with the loading kernel); returns (value, err, evals, contour, flagged)."""
    k1, k2 = _contour_for(model, tau, fp, cfg)
    disc = np.exp(-mkt.rate * tau)
    thr, budget = cfg.trunc_threshold, cfg.max_evals

    if fp.dimensionality in ("z-only", "w-only"):
        rel = cfg.rel_tol if cfg.rel_tol is not None else 1e-8
        if fp.dimensionality == "z-only":
            def f(x):
                z = x + 1j * k1
                return _integrand(model, mkt, tau, fp, z, np.zeros_like(z), extra, which)
        else:
            def f(x):
                w = x + 1j * k2
                return _integrand(model, mkt, tau, fp, np.zeros_like(w), w, extra, which)
        r = integrate_halfline(f, rel_tol=rel, trunc_threshold=thr, max_evals=budget)
        scale = disc / np.pi
        return (float(scale * r.value[0].real), float(scale * r.error), r.evals, (k1, k2),
                r.truncated)

    if fp.dimensionality != "joint":
        raise ValueError(f"unknown dimensionality {fp.dimensionality!r}")
    rel = cfg.rel_tol if cfg.rel_tol is not None else 1e-6
    strip = strip_of_analyticity(model, tau)
    phi_b = cfg.w_bend if (fp.bend_ok and np.isinf(strip.w_hi)) else 0.0
    direction = np.exp(-1j * phi_b)
    evals = [0]
    flags = [False]

    def outer(u):
        w = 1j * k2 + u * direction

        def inner(x):
            z = (x + 1j * k1)[:, None]
            zm = (-x + 1j * k1)[:, None]
            ww = w[None, :]
            return (_integrand(model, mkt, tau, fp, z, ww, extra, which)
                    + _integrand(model, mkt, tau, fp, zm, ww, extra, which))

        r = integrate_halfline(inner, rel_tol=0.1 * rel, trunc_threshold=thr, max_evals=budget)
        evals[0] += r.evals * u.size
        flags[0] |= r.truncated
        return r.value * direction, np.full(u.size, r.error)

    r = integrate_halfline(outer, h0=0.5, rel_tol=rel, trunc_threshold=thr, max_evals=budget)
    scale = disc / (2 * np.pi**2)
    return (float(scale * r.value[0].real), float(scale * r.error), evals[0], (k1, k2),
            r.truncated or flags[0])


def price_transform(model, mkt: MarketState, fp: FourierPayoff, maturity: float,
                    cfg: QuadConfig = QuadConfig()) -> PricingResult:
    """Price a payoff given directly by its transform and strip."""
    tau = _tau(mkt, maturity)
    return PricingResult(*_run(model, mkt, tau, fp, cfg))


def price(model, mkt: MarketState, c, cfg: QuadConfig = QuadConfig()) -> PricingResult:
    """Value of contract c at t0."""
    return price_transform(model, mkt, fourier_transform(c), c.maturity, cfg)


def delta(model, mkt: MarketState, c, cfg: QuadConfig = QuadConfig()) -> PricingResult:
    """dV/dS via the kernel -i z / S."""
    tau = _tau(mkt, c.maturity)
    s = mkt.spot
    return PricingResult(*_run(model, mkt, tau, fourier_transform(c), cfg,
                               extra=lambda z: -1j * z / s))


def gamma(model, mkt: MarketState, c, cfg: QuadConfig = QuadConfig()) -> PricingResult:
    """d^2V/dS^2 via the kernel (i z - z^2) / S^2."""
    tau = _tau(mkt, c.maturity)
    s = mkt.spot
    return PricingResult(*_run(model, mkt, tau, fourier_transform(c), cfg,
                               extra=lambda z: (1j * z - z * z) / (s * s)))


# ---------------------------------------------------------------------------
# activity-rate vega

def bump_state(model, which: str, h: float):
    """Copy of model with the named initial activity state shifted by h.
    Returns None when the model does not carry that state."""
    if which == "v0" and isinstance(model, (Heston, Bates, Fang)):
        return replace(model, cir=replace(model.cir, v0=model.cir.v0 + h))
    if which == "lambda0":
        if isinstance(model, Fang):
            return replace(model, intensity=replace(model.intensity, v0=model.intensity.v0 + h))
        if isinstance(model, (Merton, Kou, Bates)):
            jumps = model.jumps
            if isinstance(jumps, NormalJumps) or hasattr(jumps, "lam"):
                return replace(model, jumps=replace(jumps, lam=jumps.lam + h))
    if which.startswith("sigma0_") and isinstance(model, WishartDtc):
        i, j = int(which[-2]) - 1, int(which[-1]) - 1
        s = np.array(model.params.sigma0_mat)
        s[i, j] += h
        if i != j:
            s[j, i] += h
        return replace(model, params=replace(model.params, sigma0=s.tolist()))
    return None


def _state_value(model, which):
    if which == "v0":
        return model.cir.v0
    if which == "lambda0":
        return model.intensity.v0 if isinstance(model, Fang) else model.jumps.lam
    i, j = int(which[-2]) - 1, int(which[-1]) - 1
    return model.params.sigma0_mat[i, j]


def activity_vega(model, mkt: MarketState, c, cfg: QuadConfig = QuadConfig(),
                  which: str = "v0", method: str = "auto") -> PricingResult:
    """dV/d(initial activity state).  method 'auto'/'loading' integrates the
    affine loading kernel -A(-z, -w); 'fd' takes central differences of the
    price with relative step 1e-4 (also used when the loading is not
    available)."""
    if which not in STATE_NAMES:
        raise ValueError(f"unknown state {which!r}; expected one of {STATE_NAMES}")
    if method not in ("auto", "loading", "fd"):
        raise ValueError(f"unknown method {method!r}")
    fp = fourier_transform(c)
    tau = _tau(mkt, c.maturity)
    if bump_state(model, which, 0.0) is None:
        k = _contour_for(model, tau, fp, cfg)
        return PricingResult(0.0, 0.0, 0, k)
    if method != "fd":
        try:
            return PricingResult(*_run(model, mkt, tau, fp, cfg, which=which))
        except NotImplementedError:
            if method == "loading":
                raise
    x0 = _state_value(model, which)
    h = 1e-4 * max(abs(x0), 1e-8)
    up = price(bump_state(model, which, h), mkt, c, cfg)
    dn = price(bump_state(model, which, -h), mkt, c, cfg)
    return PricingResult((up.price - dn.price) / (2 * h),
                         (up.err_estimate + dn.err_estimate) / (2 * h),
                         up.evals + dn.evals, up.contour, up.flagged or dn.flagged)
