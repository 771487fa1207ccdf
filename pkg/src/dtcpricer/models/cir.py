"""Integrated square-root (CIR) process: Laplace transform of the clock
int_0^tau v_s ds, its Riccati oracle and the leverage-neutral shift."""
from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import DomainError
from .params import CirParams, LeverageNeutralCir


def leverage_neutral_cir(p: CirParams, z) -> LeverageNeutralCir:
    """Coefficients under the leverage-neutral measure:
    alpha^z = alpha - i rho z eta, theta^z = alpha theta / alpha^z."""
    az = p.alpha - 1j * p.rho * np.asarray(z, dtype=complex) * p.eta
    if np.any(az == 0):
        raise DomainError("alpha = i rho z eta: leverage-neutral CIR is singular")
    if np.ndim(az) == 0:
        az = complex(az)
    return LeverageNeutralCir(az, p.alpha * p.theta / az, p.eta, p.v0, p.alpha * p.theta)


def _log1p_over_x(x):
    """log(1 + x) / x with the removable singularity at 0."""
    small = np.abs(x) < 1e-4
    xs = np.where(small, 0, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        big = np.log1p(xs) / np.where(small, 1, xs)
    series = 1 - x / 2 + x * x / 3 - x**3 / 4
    return np.where(small, series, big)


def cir_exponents(alpha, alpha_theta, eta, tau, lam):
    """Coefficients (A, B) with E[exp(-lam int_0^tau v ds)] = exp(-A v0 - B).

    alpha may be complex (leverage shift).  The formulas are rearranged so
    that nothing grows with e^{gamma tau} and eta can be taken to 0:

        gamma = sqrt(alpha^2 + 2 eta^2 lam)       (principal root)
        A = 2 lam (1 - e) / ((gamma + alpha)(1 - e) + 2 gamma e),  e = exp(-gamma tau)
        B = 4 alpha theta lam / (gamma + alpha) * (tau/2 - E log1p(-delta E)/(-delta E))
        E = (1 - e) / (2 gamma),  delta = gamma - alpha = 2 eta^2 lam / (gamma + alpha)

    The log is the continuous branch along tau' in [0, tau]; where the
    argument can wind (|delta/gamma| large) it is unwrapped on a tau-grid.
    """
    alpha, alpha_theta, lam = np.broadcast_arrays(
        np.asarray(alpha, dtype=complex), np.asarray(alpha_theta, dtype=complex),
        np.asarray(lam, dtype=complex))
    eta2 = eta * eta
    gamma = np.sqrt(alpha * alpha + 2 * eta2 * lam)
    gpa = gamma + alpha
    if np.any(np.abs(gpa) < 1e-300):
        raise DomainError("gamma + alpha vanishes: CIR transform undefined")
    delta = 2 * eta2 * lam / gpa
    one_m_e = -np.expm1(-gamma * tau)
    e = 1 - one_m_e
    denom = gpa * one_m_e + 2 * gamma * e
    if np.any(np.abs(denom) < 1e-280):
        raise DomainError("CIR transform denominator vanishes (explosion)")
    A = 2 * lam * one_m_e / denom
    g_safe = np.where(gamma == 0, 1, gamma)
    E = np.where(gamma == 0, tau / 2, one_m_e / (2 * g_safe))
    x = -delta * E
    L = _log1p_over_x(x)

    # branch tracking: 1 + x(tau') = 1 - delta E(tau') starts at 1 for tau' = 0
    risky = np.abs(delta) >= 0.5 * np.abs(gamma)
    if np.any(risky):
        d = delta[risky]
        g = gamma[risky]
        n = int(max(64, np.ceil(4 * np.max(np.abs(g)) * tau / np.pi)))
        phase = np.zeros(d.shape)
        prev = np.ones_like(d)
        for k in range(1, n + 1):
            t = tau * k / n
            ek = np.where(g == 0, t / 2, -np.expm1(-g * t) / (2 * np.where(g == 0, 1, g)))
            cur = 1 - d * ek
            phase += np.angle(cur / prev)
            prev = cur
        logv = np.log(np.abs(prev)) + 1j * phase
        xr = x[risky]
        L[risky] = np.where(np.abs(xr) > 0, logv / np.where(xr == 0, 1, xr), 1)
    B = 4 * alpha_theta * lam / gpa * (tau / 2 - E * L)
    return A, B


def cir_integrated_laplace(p, tau: float, lam):
    """E[exp(-lam int_0^tau v_s ds)] for CIR (or leverage-neutral) params."""
    at = p.alpha_theta if isinstance(p, LeverageNeutralCir) else p.alpha * p.theta
    A, B = cir_exponents(p.alpha, at, p.eta, tau, lam)
    val = np.exp(-A * p.v0 - B)
    return complex(val) if np.ndim(val) == 0 else val


def cir_laplace_via_ode(p, tau: float, lam, rtol: float = 1e-11, atol: float = 1e-13) -> complex:
    """Oracle: integrate the Riccati system
    A' = lam - alpha A - eta^2 A^2 / 2,  B' = alpha theta A,  A(0) = B(0) = 0."""
    alpha = complex(p.alpha)
    at = complex(p.alpha_theta if isinstance(p, LeverageNeutralCir) else p.alpha * p.theta)
    lam = complex(lam)
    eta2 = p.eta**2

    def rhs(_t, y):
        a = y[0]
        return [lam - alpha * a - 0.5 * eta2 * a * a, at * a]

    sol = solve_ivp(rhs, (0.0, tau), [0j, 0j], method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise DomainError(f"Riccati integration failed: {sol.message}")
    A, B = sol.y[:, -1]
    return complex(np.exp(-A * p.v0 - B))


def cir_explodes(alpha, eta, lam, tau, n_grid: int = 400):
    """True where the real-argument transform E[exp(-lam int v)] blows up
    before tau, i.e. cosh(g t/2) + (alpha/g) sinh(g t/2) reaches 0 for some
    t in (0, tau].  alpha, lam real (arrays broadcast)."""
    alpha, lam = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(lam, float))
    g2 = alpha * alpha + 2 * eta * eta * lam
    g = np.sqrt(g2.astype(complex))
    t = np.linspace(tau / n_grid, tau, n_grid).reshape((-1,) + (1,) * alpha.ndim)
    small = np.abs(g) < 1e-12
    gs = np.where(small, 1, g)
    with np.errstate(over="ignore", invalid="ignore"):
        f = np.cosh(gs * t / 2) + alpha / gs * np.sinh(gs * t / 2)
    f = np.where(small, 1 + alpha * t / 2, f)
    return np.any(f.real <= 0, axis=0) | ~np.all(np.isfinite(f), axis=0)
