"""Parameter blocks for the eight concrete models."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from ..errors import ParameterError
from ..levy_core import CgmyJumps, DoubleExpJumps, NormalJumps


@dataclass(frozen=True)
class CirParams:
    """Square-root activity rate dv = alpha (theta - v) dt + eta sqrt(v) dW,
    with rho the correlation between dW and the asset Brownian motion."""
    alpha: float
    theta: float
    eta: float
    v0: float
    rho: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError("CIR alpha (mean-reversion speed) must be positive")
        if not self.theta > 0:
            raise ParameterError("CIR theta (long-run level) must be positive")
        if not self.eta > 0:
            raise ParameterError("CIR eta (vol-of-vol) must be positive")
        if not self.v0 > 0:
            raise ParameterError("CIR v0 (initial rate) must be positive")
        if not -1 <= self.rho <= 1:
            raise ParameterError("correlation rho must lie in [-1, 1]")
        if 2 * self.alpha * self.theta < self.eta**2:
            raise ParameterError(
                f"Feller condition 2*alpha*theta >= eta^2 violated "
                f"({2 * self.alpha * self.theta:.6g} < {self.eta**2:.6g})")


class LeverageNeutralCir(NamedTuple):
    """CIR coefficients after the leverage-neutral measure change; alpha and
    theta may be complex.  alpha_theta is kept as a product because it is real
    whenever the original alpha*theta is."""
    alpha: complex
    theta: complex
    eta: float
    v0: float
    alpha_theta: float


def _mat(x, name):
    a = np.asarray(x, dtype=float)
    if a.shape != (2, 2) or not np.all(np.isfinite(a)):
        raise ParameterError(f"{name} must be a finite 2x2 matrix")
    return tuple(map(tuple, a))


@dataclass(frozen=True)
class WishartParams:
    """2x2 Wishart activity-rate matrix
    dS = (c Q^T Q + M S + S M^T) dt + sqrt(S) dB Q + Q^T dB^T sqrt(S),
    with v = S[0,0] driving the diffusion and u = S[1,1] the jump clock."""
    q: tuple
    m: tuple
    c: float
    sigma0: tuple
    rho: float
    jumps: NormalJumps = field(default_factory=lambda: NormalJumps.from_kappa(-0.1, 0.1))

    def __post_init__(self):
        object.__setattr__(self, "q", _mat(self.q, "Q"))
        object.__setattr__(self, "m", _mat(self.m, "M"))
        object.__setattr__(self, "sigma0", _mat(self.sigma0, "sigma0"))
        if abs(np.linalg.det(self.q_mat)) < 1e-14:
            raise ParameterError("Wishart Q must be invertible")
        sym = 0.5 * (self.m_mat + self.m_mat.T)
        if np.max(np.linalg.eigvalsh(sym)) >= 0:
            raise ParameterError("Wishart M must be negative definite")
        if not self.c >= 1:
            raise ParameterError("Wishart c must satisfy c >= n - 1 = 1")
        s0 = self.sigma0_mat
        if not np.allclose(s0, s0.T) or np.min(np.linalg.eigvalsh(s0)) <= 0:
            raise ParameterError("Wishart sigma0 must be symmetric positive definite")
        if not -1 <= self.rho <= 1:
            raise ParameterError("correlation rho must lie in [-1, 1]")
        if self.jumps.lam != 1.0:
            raise ParameterError("Wishart jumps run on the u-clock with unit base intensity")

    @property
    def q_mat(self):
        return np.array(self.q)

    @property
    def m_mat(self):
        return np.array(self.m)

    @property
    def sigma0_mat(self):
        return np.array(self.sigma0)

    @property
    def r_mat(self):
        return np.diag([self.rho, 0.0])


@dataclass(frozen=True)
class BlackScholes:
    sigma: float

    def __post_init__(self):
        if self.sigma < 0:
            raise ParameterError("sigma must be nonnegative")


@dataclass(frozen=True)
class Heston:
    cir: CirParams


@dataclass(frozen=True)
class Merton:
    sigma: float
    jumps: NormalJumps

    def __post_init__(self):
        if self.sigma < 0:
            raise ParameterError("sigma must be nonnegative")


@dataclass(frozen=True)
class Kou:
    sigma: float
    jumps: DoubleExpJumps

    def __post_init__(self):
        if self.sigma < 0:
            raise ParameterError("sigma must be nonnegative")


@dataclass(frozen=True)
class Cgmy:
    jumps: CgmyJumps


@dataclass(frozen=True)
class Bates:
    cir: CirParams
    jumps: NormalJumps


@dataclass(frozen=True)
class Fang:
    """Heston diffusion plus Normal jumps whose clock is an independent CIR
    intensity lambda_t (no leverage on the intensity)."""
    cir: CirParams
    intensity: CirParams
    jumps: NormalJumps

    def __post_init__(self):
        if self.intensity.rho != 0:
            raise ParameterError("the jump-intensity Brownian motion is independent: rho must be 0")
        if self.jumps.lam != 1.0:
            raise ParameterError("Fang jumps run on the intensity clock with unit base intensity")


@dataclass(frozen=True)
class WishartDtc:
    params: WishartParams


ModelSpec = Union[BlackScholes, Heston, Merton, Kou, Cgmy, Bates, Fang, WishartDtc]

MODEL_NAMES = {
    BlackScholes: "bs", Heston: "heston", Merton: "merton", Kou: "kou",
    Cgmy: "cgmy", Bates: "bates", Fang: "fang", WishartDtc: "wishart",
}


def model_name(model) -> str:
    return MODEL_NAMES[type(model)]


@dataclass(frozen=True)
class ComplexStrip:
    """Bounds on Im(z) and Im(w); infinities allowed."""
    z_lo: float = -np.inf
    z_hi: float = np.inf
    w_lo: float = -np.inf
    w_hi: float = np.inf

    def __post_init__(self):
        if not (self.z_lo < self.z_hi and self.w_lo < self.w_hi):
            raise ValueError("strip bounds must satisfy lo < hi")

    def contains(self, z, w) -> bool:
        zi = np.imag(z)
        wi = np.imag(w)
        return bool(np.all((self.z_lo < zi) & (zi < self.z_hi)
                           & (self.w_lo < wi) & (wi < self.w_hi)))
