"""Leverage-neutral joint characteristic function
Phi(z, w) = E[exp(i z log(S~_t / S_t0) + i w (TV_t - TV_t0))] for every model,
its affine loadings on the initial activity states, and strip probing."""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..errors import DomainError
from ..levy_core import LevySpec, NoJumps, zeta, xi
from .cir import cir_exponents, cir_explodes, leverage_neutral_cir
from .params import (Bates, BlackScholes, Cgmy, ComplexStrip, Fang, Heston, Kou, Merton,
                     WishartDtc)
from .wishart import wishart_explodes, wishart_riccati

_UNIT_DIFFUSION = LevySpec(0.0, 1.0, NoJumps())

STATE_NAMES = ("v0", "lambda0", "sigma0_11", "sigma0_12", "sigma0_22")


def diffusion_argument(z, w):
    """Laplace argument of the diffusion clock: (z^2 + i z - 2 i w) / 2."""
    return zeta(z, w, _UNIT_DIFFUSION)


def _jump_argument(jumps, z, w):
    return xi(z, w, LevySpec(0.0, 0.0, jumps))


def _unit_jump_argument(jumps, z, w):
    """Jump argument per unit of jump intensity."""
    return _jump_argument(replace(jumps, lam=1.0), z, w)


def _cir_part(p, tau, z, w):
    lev = leverage_neutral_cir(p, z)
    return cir_exponents(lev.alpha, lev.alpha_theta, p.eta, tau, diffusion_argument(z, w))


def _log_cf(model, tau, z, w):
    """Return (log Phi, loadings) where loadings maps state name -> A with
    d Phi / d state = -A Phi."""
    if isinstance(model, BlackScholes):
        return -tau * model.sigma**2 * diffusion_argument(z, w), {}
    if isinstance(model, (Merton, Kou)):
        unit = _unit_jump_argument(model.jumps, z, w)
        base = -tau * (model.sigma**2 * diffusion_argument(z, w) + model.jumps.lam * unit)
        # the constant intensity plays the role of the jump activity state
        return base, {"lambda0": tau * unit}
    if isinstance(model, Cgmy):
        return -tau * _jump_argument(model.jumps, z, w), {}
    if isinstance(model, Heston):
        A, B = _cir_part(model.cir, tau, z, w)
        return -A * model.cir.v0 - B, {"v0": A}
    if isinstance(model, Bates):
        A, B = _cir_part(model.cir, tau, z, w)
        unit = _unit_jump_argument(model.jumps, z, w)
        return (-A * model.cir.v0 - B - tau * model.jumps.lam * unit,
                {"v0": A, "lambda0": tau * unit})
    if isinstance(model, Fang):
        A, B = _cir_part(model.cir, tau, z, w)
        ip = model.intensity
        A2, B2 = cir_exponents(ip.alpha, ip.alpha * ip.theta, ip.eta, tau,
                               _jump_argument(model.jumps, z, w))
        return -A * model.cir.v0 - B - A2 * ip.v0 - B2, {"v0": A, "lambda0": A2}
    if isinstance(model, WishartDtc):
        p = model.params
        a, amat = wishart_riccati(p, tau, z, diffusion_argument(z, w),
                                  _jump_argument(p.jumps, z, w))
        tr = np.einsum("...ij,ji->...", amat, p.sigma0_mat)
        return -a - tr, {"sigma0_11": amat[..., 0, 0], "sigma0_22": amat[..., 1, 1],
                         "sigma0_12": amat[..., 0, 1] + amat[..., 1, 0]}
    raise TypeError(f"unknown model {model!r}")


def cf(model, tau: float, z, w):
    """Leverage-neutral joint characteristic function of (log S~, TV)."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    z, w = np.broadcast_arrays(np.asarray(z, complex), np.asarray(w, complex))
    logphi, _ = _log_cf(model, tau, z, w)
    val = np.exp(logphi)
    return complex(val) if np.ndim(val) == 0 else val


def cf_with_loading(model, tau: float, z, w, which: str):
    """(Phi, A) with d Phi / d state = -A Phi for the named initial state.
    States a model does not carry have zero loading."""
    if which not in STATE_NAMES:
        raise ValueError(f"unknown state {which!r}; expected one of {STATE_NAMES}")
    z, w = np.broadcast_arrays(np.asarray(z, complex), np.asarray(w, complex))
    logphi, loads = _log_cf(model, tau, z, w)
    phi = np.exp(logphi)
    return phi, np.broadcast_to(loads.get(which, 0.0), phi.shape)


# ---------------------------------------------------------------------------
# strips

_PROBE_CAP = 512.0


def _probe(exploded, sign: float) -> float:
    """Largest y (times sign) along which exploded(sign*y) stays False,
    shrunk by 10%; inf if no explosion up to the cap."""
    good, y = 0.0, 0.25
    while y <= _PROBE_CAP:
        if exploded(sign * y):
            break
        good, y = y, 2 * y
    else:
        return sign * np.inf
    bad = y
    for _ in range(30):
        mid = 0.5 * (good + bad)
        if exploded(sign * mid):
            bad = mid
        else:
            good = mid
        if bad - good < 1e-4 * bad:
            break
    return sign * 0.9 * good


def _real_jump_arg(jumps, zi, wi):
    with np.errstate(all="ignore"):
        try:
            v = complex(_jump_argument(jumps, 1j * zi, 1j * wi))
        except DomainError:
            return None
    return v.real if np.isfinite(v) else None


def _explosion_fn(model, tau):
    """exploded(zi, wi) for purely imaginary (z, w) = (i zi, i wi)."""
    def cir_blow(p, zi, wi, lev=True):
        alpha = p.alpha + p.rho * zi * p.eta if lev else p.alpha
        lam = 0.5 * (-zi * zi - zi) + wi
        return bool(cir_explodes(alpha, p.eta, lam, tau))

    def jump_ok(jumps, zi, wi):
        return _real_jump_arg(jumps, zi, wi) is not None

    if isinstance(model, Heston):
        return lambda zi, wi: cir_blow(model.cir, zi, wi)
    if isinstance(model, Bates):
        return lambda zi, wi: (not jump_ok(model.jumps, zi, wi)) or cir_blow(model.cir, zi, wi)

    if isinstance(model, Fang):
        ip = model.intensity

        def fang(zi, wi):
            x = _real_jump_arg(model.jumps, zi, wi)
            if x is None or cir_blow(model.cir, zi, wi):
                return True
            return bool(cir_explodes(ip.alpha, ip.eta, x, tau))
        return fang
    if isinstance(model, WishartDtc):
        p = model.params

        def wish(zi, wi):
            x = _real_jump_arg(p.jumps, zi, wi)
            if x is None:
                return True
            return wishart_explodes(p, tau, zi, 0.5 * (-zi * zi - zi) + wi, x)
        return wish
    return None


def strip_of_analyticity(model, tau: float | None = None) -> ComplexStrip:
    """Conservative bounds on (Im z, Im w) where cf(model, tau, ., .) is
    analytic.  Activity-rate models are probed numerically for moment
    explosion before tau (default: a long horizon of 100 years)."""
    inf = np.inf
    if isinstance(model, BlackScholes):
        return ComplexStrip()
    if isinstance(model, Merton):
        return ComplexStrip(w_lo=-0.5 / model.jumps.delta**2)
    if isinstance(model, Kou):
        return ComplexStrip(-model.jumps.alpha, model.jumps.beta, 0.0, inf)
    if isinstance(model, Cgmy):
        return ComplexStrip(-model.jumps.beta_plus, model.jumps.beta_minus, 0.0, inf)
    horizon = 100.0 if tau is None else tau
    blow = _explosion_fn(model, horizon)
    if blow is None:
        raise TypeError(f"unknown model {model!r}")
    z_lo = _probe(lambda y: blow(y, 0.0), -1.0)
    z_hi = _probe(lambda y: blow(y, 0.0), 1.0)
    w_lo = _probe(lambda y: blow(0.0, y), -1.0)
    w_hi = _probe(lambda y: blow(0.0, y), 1.0)
    jumps = model.params.jumps if isinstance(model, WishartDtc) else getattr(model, "jumps", None)
    if jumps is not None:
        w_lo = max(w_lo, -0.9 * 0.5 / jumps.delta**2)
    return ComplexStrip(z_lo, z_hi, w_lo, w_hi)
