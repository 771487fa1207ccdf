"""Levy building blocks: jump laws, characteristic exponents and the joint
exponent of (jumps, squared jumps).

Conventions
-----------
psi_jump(theta) is the exponent of the compensated pure-jump part X^d,
E[exp(i theta X^d_t)] = exp(t psi_jump(theta)), so that for compound Poisson
laws psi_jump = lam (phi_J - 1) and for CGMY the fully compensated form.

psi_D(z, w) is the exponent of the pair (X^d, [X^d]):
E[exp(i z X^d_t + i w [X^d]_t)] = exp(t psi_D(z, w)), with the squared-jump
coordinate left uncompensated.  Compound Poisson gives lam (phi_{J,J^2} - 1).

All functions broadcast over numpy arrays of z, w, theta.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
import scipy.integrate as si

from .errors import DomainError, ParameterError
from .special_functions import complex_erfcx, gamma_fn, hyp1f1

THETA0 = -1j  # martingale exponent parameter: i*THETA0*X = X


@dataclass(frozen=True)
class NoJumps:
    """Pure diffusion: no jump component."""

    @property
    def kappa(self) -> float:
        return 0.0


@dataclass(frozen=True)
class NormalJumps:
    """Compound Poisson with Normal(m, delta^2) log-jumps and intensity lam."""
    m: float
    delta: float
    lam: float = 1.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ParameterError("Normal jumps need delta > 0")
        if self.lam < 0:
            raise ParameterError("jump intensity must be nonnegative")

    @classmethod
    def from_kappa(cls, kappa: float, delta: float, lam: float = 1.0) -> "NormalJumps":
        """Build from the compensator kappa = E[e^J] - 1."""
        if not kappa > -1:
            raise ParameterError("kappa must exceed -1")
        return cls(m=float(np.log1p(kappa) - 0.5 * delta**2), delta=delta, lam=lam)

    @property
    def kappa(self) -> float:
        return float(np.expm1(self.m + 0.5 * self.delta**2))

    def density(self, x):
        return np.exp(-0.5 * ((x - self.m) / self.delta) ** 2) / (np.sqrt(2 * np.pi) * self.delta)


@dataclass(frozen=True)
class DoubleExpJumps:
    """Kou double-exponential log-jumps: up with prob p and rate alpha,
    down with prob 1-p and rate beta."""
    p: float
    alpha: float
    beta: float
    lam: float = 1.0

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ParameterError("up-probability p must lie in (0, 1)")
        if not self.alpha > 1:
            raise ParameterError("up-rate alpha must exceed 1 so that E[e^J] is finite")
        if not self.beta > 0:
            raise ParameterError("down-rate beta must be positive")
        if self.lam < 0:
            raise ParameterError("jump intensity must be nonnegative")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def kappa(self) -> float:
        return self.p * self.alpha / (self.alpha - 1) + self.q * self.beta / (self.beta + 1) - 1

    def density(self, x):
        x = np.asarray(x, dtype=float)
        up = self.p * self.alpha * np.exp(-self.alpha * np.abs(x))
        down = self.q * self.beta * np.exp(-self.beta * np.abs(x))
        return np.where(x >= 0, up, down)


@dataclass(frozen=True)
class CgmyJumps:
    """Tempered stable (CGMY) Levy measure
    nu(dx) = c_+ e^{-beta_+ x} x^{-1-alpha_+} dx on x > 0 and the mirrored
    expression with (c_-, beta_-, alpha_-) on x < 0."""
    c_plus: float
    c_minus: float
    beta_plus: float
    beta_minus: float
    alpha_plus: float
    alpha_minus: float

    def __post_init__(self):
        if not (self.c_plus > 0 and self.c_minus > 0):
            raise ParameterError("CGMY c_plus, c_minus must be positive")
        if not (self.beta_plus > 1 and self.beta_minus > 0):
            raise ParameterError("CGMY needs beta_plus > 1 (finite E[e^X]) and beta_minus > 0")
        for a in (self.alpha_plus, self.alpha_minus):
            if not a < 2 or a in (0.0, 1.0):
                raise ParameterError("CGMY alpha must be < 2 and differ from 0 and 1")

    def sides(self):
        """(c, beta, alpha, sign) for the positive and negative half-lines."""
        return ((self.c_plus, self.beta_plus, self.alpha_plus, 1.0),
                (self.c_minus, self.beta_minus, self.alpha_minus, -1.0))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        with np.errstate(divide="ignore"):
            pos = self.c_plus * np.exp(-self.beta_plus * ax) * ax ** (-1 - self.alpha_plus)
            neg = self.c_minus * np.exp(-self.beta_minus * ax) * ax ** (-1 - self.alpha_minus)
        return np.where(x > 0, pos, neg)

    @cached_property
    def truncation_moments(self):
        """(b1, b2) with b1 = -int_{|x|>1} x nu(dx), b2 = int_{|x|<=1} x^2 nu(dx)."""
        b1 = 0.0
        b2 = 0.0
        for c, beta, alpha, sgn in self.sides():
            f1 = si.quad(lambda x: x * c * np.exp(-beta * x) * x ** (-1 - alpha), 1, np.inf,
                         epsabs=1e-14, epsrel=1e-13)[0]
            f2 = si.quad(lambda x: x * x * c * np.exp(-beta * x) * x ** (-1 - alpha), 0, 1,
                         epsabs=1e-14, epsrel=1e-13, limit=200)[0]
            b1 -= sgn * f1
            b2 += f2
        return b1, b2

    @property
    def kappa(self) -> float:
        """Compensated exponent at -i: int (e^x - 1 - x) nu(dx)."""
        return float(np.real(psi_jump(self, THETA0)))


JumpSpec = Union[NoJumps, NormalJumps, DoubleExpJumps, CgmyJumps]


@dataclass(frozen=True)
class LevySpec:
    """Levy triplet: drift mu, diffusion sigma and a jump law."""
    mu: float = 0.0
    sigma: float = 0.0
    jumps: JumpSpec = NoJumps()

    def __post_init__(self):
        if self.sigma < 0:
            raise ParameterError("sigma must be nonnegative")


def _c(x):
    return np.asarray(x, dtype=complex)


def _out(val, *args):
    return complex(val) if all(np.ndim(a) == 0 for a in args) else val


def psi_continuous(spec: LevySpec, theta):
    """Exponent of the continuous part: i mu theta - sigma^2 theta^2 / 2."""
    theta = _c(theta)
    return _out(1j * spec.mu * theta - 0.5 * spec.sigma**2 * theta**2, theta)


def _cgmy_side_exponent(c, beta, alpha, theta):
    # int_0^inf (e^{i theta x} - 1 - i theta x) c e^{-beta x} x^{-1-alpha} dx
    return c * gamma_fn(-alpha) * beta**alpha * (
        (1 - 1j * theta / beta) ** alpha - 1 + 1j * theta * alpha / beta)


def psi_jump(spec: JumpSpec, theta):
    """Characteristic exponent of the compensated jump part X^d."""
    theta = _c(theta)
    if isinstance(spec, NoJumps):
        val = np.zeros_like(theta)
    elif isinstance(spec, NormalJumps):
        val = spec.lam * (np.exp(1j * spec.m * theta - 0.5 * spec.delta**2 * theta**2) - 1)
    elif isinstance(spec, DoubleExpJumps):
        if np.any((theta.imag <= -spec.alpha) | (theta.imag >= spec.beta)):
            raise DomainError("Kou exponent needs -alpha < Im(theta) < beta")
        val = spec.lam * (spec.p * spec.alpha / (spec.alpha - 1j * theta)
                          + spec.q * spec.beta / (spec.beta + 1j * theta) - 1)
    elif isinstance(spec, CgmyJumps):
        if np.any((theta.imag <= -spec.beta_plus) | (theta.imag >= spec.beta_minus)):
            raise DomainError("CGMY exponent needs -beta_plus < Im(theta) < beta_minus")
        val = (_cgmy_side_exponent(spec.c_plus, spec.beta_plus, spec.alpha_plus, theta)
               + _cgmy_side_exponent(spec.c_minus, spec.beta_minus, spec.alpha_minus, -theta))
    else:
        raise TypeError(f"unknown jump spec {spec!r}")
    return _out(val, theta)


def _kou_half(weight, rate, b, w):
    # weight*rate * int_0^inf exp(-rate x) exp(-(b - rate) x + i w x^2) dx, b = rate -/+ i z
    a = -1j * w
    zero = w == 0
    sa = np.sqrt(np.where(zero, 1.0, a))
    with np.errstate(all="ignore"):
        gauss = 0.5 * np.sqrt(np.pi) / sa * complex_erfcx(np.where(zero, 0.0, b / (2 * sa)))
    return weight * rate * np.where(zero, 1 / np.where(zero, b, 1.0), gauss)


def phi_joint_jump(spec: JumpSpec, z, w):
    """Joint characteristic function E[exp(i z J + i w J^2)] of one jump."""
    z, w = np.broadcast_arrays(_c(z), _c(w))
    if isinstance(spec, NoJumps):
        val = np.ones_like(z)
    elif isinstance(spec, NormalJumps):
        d2 = spec.delta**2
        if np.any(w.imag <= -0.5 / d2):
            raise DomainError("Normal joint transform needs Im(w) > -1/(2 delta^2)")
        s = 1 - 2j * d2 * w
        val = np.exp((1j * spec.m * z - 0.5 * d2 * z**2 + 1j * spec.m**2 * w) / s) / np.sqrt(s)
    elif isinstance(spec, DoubleExpJumps):
        if np.any(w.imag < 0):
            raise DomainError("double-exponential joint transform needs Im(w) >= 0")
        if np.any((z.imag <= -spec.alpha) | (z.imag >= spec.beta)):
            raise DomainError("double-exponential transform needs -alpha < Im(z) < beta")
        val = (_kou_half(spec.p, spec.alpha, spec.alpha - 1j * z, w)
               + _kou_half(spec.q, spec.beta, spec.beta + 1j * z, w))
    elif isinstance(spec, CgmyJumps):
        raise TypeError("CGMY has infinite activity and no single-jump law")
    else:
        raise TypeError(f"unknown jump spec {spec!r}")
    return _out(val, z, w)


def _gauss_tail_moment(s, a, b):
    """F(s; a, b) = int_0^inf x^{s-1} exp(-a x^2 - b x) dx, analytically
    continued in s; Re a >= 0, Re b > 0."""
    out = np.empty(np.broadcast(a, b).shape, dtype=complex)
    a, b = np.broadcast_arrays(a, b)
    with np.errstate(over="ignore", invalid="ignore"):
        x = b * b / (4 * np.where(a == 0, 1.0, a))
    # The 1F1 form cancels like exp(Re x); the large-x expansion errs like exp(-|x|).
    # Non-finite x means a is so small that the series in a is exact.
    with np.errstate(invalid="ignore"):
        use_series = (a == 0) | ~np.isfinite(x) | (np.abs(x) + x.real > 36.8)
    if np.any(use_series):
        aa, bb = a[use_series], b[use_series]
        r = -aa / (bb * bb)
        term = np.ones_like(r)
        total = np.ones_like(r)
        live = np.ones(r.shape, dtype=bool)
        for n in range(200):
            nxt = term * (s + 2 * n) * (s + 2 * n + 1) * r / (n + 1)
            live &= np.abs(nxt) < np.abs(term)
            total = total + np.where(live, nxt, 0)
            term = np.where(live, nxt, term)
            live &= np.abs(term) > 1e-17 * np.abs(total)
            if not np.any(live):
                break
        out[use_series] = gamma_fn(s) * bb ** (-s) * total
    rest = ~use_series
    if np.any(rest):
        aa, bb, xx = a[rest], b[rest], x[rest]
        ra = np.sqrt(aa)
        out[rest] = 0.5 * aa ** (-s / 2) * (
            gamma_fn(s / 2) * hyp1f1(s / 2, 0.5, xx)
            - bb / ra * gamma_fn((s + 1) / 2) * hyp1f1((s + 1) / 2, 1.5, xx))
    return out


def _cgmy_side_joint(c, beta, alpha, z, w):
    # int_0^inf (e^{i z x + i w x^2} - 1 - i z x) c e^{-beta x} x^{-1-alpha} dx
    a = -1j * w
    b = beta - 1j * z
    f = _gauss_tail_moment(-alpha, a, b)
    return c * (f - gamma_fn(-alpha) * beta**alpha
                - 1j * z * gamma_fn(1 - alpha) * beta ** (alpha - 1))


def psi_D(spec: JumpSpec, z, w):
    """Joint exponent of (X^d, [X^d]) in closed form."""
    z, w = np.broadcast_arrays(_c(z), _c(w))
    if isinstance(spec, NoJumps):
        val = np.zeros_like(z)
    elif isinstance(spec, (NormalJumps, DoubleExpJumps)):
        val = spec.lam * (phi_joint_jump(spec, z, w) - 1)
    elif isinstance(spec, CgmyJumps):
        if np.any(w.imag < 0):
            raise DomainError("CGMY joint exponent needs Im(w) >= 0")
        if np.any((z.imag <= -spec.beta_plus) | (z.imag >= spec.beta_minus)):
            raise DomainError("CGMY joint exponent needs -beta_plus < Im(z) < beta_minus")
        val = (_cgmy_side_joint(spec.c_plus, spec.beta_plus, spec.alpha_plus, z, w)
               + _cgmy_side_joint(spec.c_minus, spec.beta_minus, spec.alpha_minus, -z, w))
    else:
        raise TypeError(f"unknown jump spec {spec!r}")
    return _out(val, z, w)


def _quad_c(f, a, b, tol, points=None):
    kw = dict(epsabs=tol, epsrel=1e-12, limit=500, complex_func=True)
    if points is not None and np.isfinite(a) and np.isfinite(b):
        kw["points"] = points
    val, err = si.quad(f, a, b, **kw)
    return val, err


def _jump_integrand(z, w, nu, comp):
    def f(x):
        u = 1j * z * x + 1j * w * x * x
        if comp:
            if abs(u) < 1e-3:
                core = u * u / 2 + u**3 / 6 + u**4 / 24
            else:
                core = np.expm1(u) - u
        else:
            core = np.expm1(u)
        return core * nu(x)
    return f


def psi_D_quadrature(spec: JumpSpec, z: complex, w: complex, abs_tol: float = 1e-9) -> complex:
    """Joint exponent by direct integration of
    int (e^{izx + iwx^2} - 1 - i(zx + wx^2) 1_{|x|<=1}) nu(dx)
    plus the truncation drift that maps it onto the closed-form convention."""
    z = complex(z)
    w = complex(w)
    if isinstance(spec, NoJumps) or (
            isinstance(spec, (NormalJumps, DoubleExpJumps)) and spec.lam == 0):
        return 0j
    if isinstance(spec, (NormalJumps, DoubleExpJumps)):
        def nu(x):
            return spec.lam * float(spec.density(x))
        pieces = [(-np.inf, -1.0, False), (-1.0, 0.0, True), (0.0, 1.0, True), (1.0, np.inf, False)]
        b1 = si.quad(lambda x: x * nu(x), -1, 1, epsabs=1e-14, points=[0.0])[0]
        b2 = si.quad(lambda x: x * x * nu(x), -1, 1, epsabs=1e-14, points=[0.0])[0]
    elif isinstance(spec, CgmyJumps):
        if w.imag < 0 or not -spec.beta_plus < z.imag < spec.beta_minus:
            raise DomainError("outside the CGMY convergence strip")

        def nu(x):
            return float(spec.density(x))
        pieces = [(-np.inf, -1.0, False), (-1.0, 0.0, True), (0.0, 1.0, True), (1.0, np.inf, False)]
        b1, b2 = spec.truncation_moments
    else:
        raise TypeError(f"unknown jump spec {spec!r}")

    total = 0j
    err = 0.0
    for lo, hi, comp in pieces:
        v, e = _quad_c(_jump_integrand(z, w, nu, comp), lo, hi, abs_tol / 8)
        total += v
        err += abs(e.real) + abs(e.imag) if isinstance(e, complex) else abs(e)
    if not np.isfinite(total) or err > 100 * abs_tol:
        raise DomainError(f"jump-measure quadrature did not converge (error estimate {err:.3g})")
    return total + 1j * z * b1 + 1j * w * b2


def zeta(z, w, spec: LevySpec):
    """First Laplace argument: -i mu (z - i z) + sigma^2 (z^2 + i z - 2 i w) / 2."""
    z, w = np.broadcast_arrays(_c(z), _c(w))
    val = -1j * spec.mu * (z - 1j * z) + 0.5 * spec.sigma**2 * (z * z + 1j * z - 2j * w)
    return _out(val, z, w)


def xi(z, w, spec: LevySpec):
    """Second Laplace argument: i z psi^d(-i) - psi_D(z, w)."""
    z, w = np.broadcast_arrays(_c(z), _c(w))
    val = 1j * z * psi_jump(spec.jumps, THETA0) - psi_D(spec.jumps, z, w)
    return _out(val, z, w)
