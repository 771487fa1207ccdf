"""Contracts on (log S_t, TV_t): terminal cashflows for simulation and the
closed-form Fourier transforms used by the inversion pricer.

The transform convention is F^(z, w) = int int e^{i z x + i w y} F(x, y) dx dy
with x = log S_t and y = TV_t, so that Im z and Im w must be large enough
for the payoff's growth to be damped.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ParameterError
from .models.params import ComplexStrip
from .special_functions import complex_erfc


@dataclass(frozen=True)
class VanillaCall:
    """(S_t - K)^+ paid at maturity."""
    strike: float
    maturity: float

    def __post_init__(self):
        if not self.strike > 0:
            raise ParameterError("strike must be positive")


@dataclass(frozen=True)
class VolatilityCall:
    """(sqrt(TV_t) - Q)^+ on total realized volatility."""
    vol_strike: float
    maturity: float

    def __post_init__(self):
        if not self.vol_strike >= 0:
            raise ParameterError("volatility strike must be nonnegative")


@dataclass(frozen=True)
class TvoCall:
    """Target volatility call: sigma_bar sqrt(t / TV_t) (S_t - H)^+."""
    strike: float
    target_vol: float
    maturity: float

    def __post_init__(self):
        if not self.strike > 0:
            raise ParameterError("strike must be positive")
        if not self.target_vol > 0:
            raise ParameterError("target volatility must be positive")


Contract = Union[VanillaCall, VolatilityCall, TvoCall]

PAYOFF_NAMES = {VanillaCall: "vanilla", VolatilityCall: "vol", TvoCall: "tvo"}


@dataclass(frozen=True)
class FourierPayoff:
    """Transform of a payoff with its strip.  dimensionality is one of
    'z-only', 'w-only', 'joint'.  bend_ok marks joint transforms that stay
    bounded on w-contours bent into the lower half plane around the cut
    w in -i[0, inf) (needed for the TVO, whose transform only decays like
    |w|^{-1/2} on horizontal lines)."""
    transform: Callable
    strip: ComplexStrip
    dimensionality: str
    bend_ok: bool = False


def payoff_value(c: Contract, log_s, tv):
    """Terminal cashflow.  For the TVO at tv = 0 the value is 0 when
    S_t <= H and +inf otherwise; simulations exclude such paths."""
    log_s = np.asarray(log_s, dtype=float)
    tv = np.asarray(tv, dtype=float)
    if np.any(tv < 0):
        raise ValueError("total variance must be nonnegative")
    if isinstance(c, VanillaCall):
        val = np.maximum(np.exp(log_s) - c.strike, 0.0)
    elif isinstance(c, VolatilityCall):
        val = np.maximum(np.sqrt(tv) - c.vol_strike, 0.0)
    elif isinstance(c, TvoCall):
        itm = np.maximum(np.exp(log_s) - c.strike, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = c.target_vol * np.sqrt(c.maturity / tv)
            val = np.where(itm > 0, scale * itm, 0.0)
    else:
        raise TypeError(f"unknown contract {c!r}")
    return float(val) if val.ndim == 0 else val


def _call_kernel(strike, z):
    # K^{1+iz} / (iz - z^2)
    return np.exp((1 + 1j * z) * np.log(strike)) / (1j * z - z * z)


def fourier_transform(c: Contract) -> FourierPayoff:
    """Closed-form transform and strip of a contract."""
    if isinstance(c, VanillaCall):
        k = c.strike

        def f(z, w=0.0):
            return _call_kernel(k, np.asarray(z, dtype=complex))
        return FourierPayoff(f, ComplexStrip(z_lo=1.0), "z-only")

    if isinstance(c, VolatilityCall):
        q = c.vol_strike

        def f(z, w):
            s = -1j * np.asarray(w, dtype=complex)   # Re s > 0 on the strip
            return np.sqrt(np.pi) * complex_erfc(q * np.sqrt(s)) / (2 * s * np.sqrt(s))
        return FourierPayoff(f, ComplexStrip(w_lo=0.0), "w-only")

    if isinstance(c, TvoCall):
        h, sbar, t = c.strike, c.target_vol, c.maturity

        def f(z, w):
            s = -1j * np.asarray(w, dtype=complex)
            # int_0^inf e^{-s y} y^{-1/2} dy = sqrt(pi / s)
            return sbar * np.sqrt(t * np.pi / s) * _call_kernel(h, np.asarray(z, dtype=complex))
        return FourierPayoff(f, ComplexStrip(z_lo=1.0, w_lo=0.0), "joint", bend_ok=True)

    raise TypeError(f"unknown contract {c!r}")
