"""Invariant and oracle-agreement checks run by `dtcpricer check`."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .levy_core import LevySpec, psi_D, psi_D_quadrature, xi
from .models import (Bates, BlackScholes, Cgmy, CirParams, Fang, Heston, Kou, Merton,
                     WishartDtc, WishartParams, cf, cir_integrated_laplace, cir_laplace_via_ode,
                     leverage_neutral_cir,
                     wishart_joint_laplace, wishart_riccati)
from .models.params import LeverageNeutralCir

TAUS = (0.25, 1.0, 3.5)


@dataclass(frozen=True)
class CheckResult:
    model: str
    name: str
    passed: bool
    value: float     # observed discrepancy
    tol: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.model:8s} {self.name:28s} {self.value:.3e} (tol {self.tol:.0e})"


def _res(model, name, value, tol):
    value = float(value)
    return CheckResult(model, name, bool(np.isfinite(value) and value <= tol), value, tol)


def _grid():
    x = np.array([-3.0, -0.7, 0.4, 2.5])
    z, w = np.meshgrid(x, 1.3 * x)
    return z.ravel(), w.ravel()


def _complex_grid():
    z, w = _grid()
    return z - 0.4j, w + 0.3j


def _cf_checks(name, model):
    out = []
    norm = max(abs(cf(model, t, 0, 0) - 1) for t in TAUS)
    out.append(_res(name, "normalization", norm, 1e-10))
    mart = max(abs(cf(model, t, -1j, 0) - 1) for t in TAUS)
    out.append(_res(name, "martingale", mart, 1e-8))
    z, w = _grid()
    herm = max(np.max(np.abs(cf(model, t, -z, -w) - np.conj(cf(model, t, z, w)))) for t in TAUS)
    out.append(_res(name, "hermitian symmetry", herm, 1e-10))
    return out


def _nesting_error(a, b):
    z, w = _complex_grid()
    return max(np.max(np.abs(cf(a, t, z, w) - cf(b, t, z, w))) for t in TAUS)


def _cir_oracle(p: CirParams):
    """Closed form vs Riccati ODE for the integrated CIR transform under the
    leverage-neutral shift."""
    worst = 0.0
    for z in (0.0, 1.5 - 0.5j, -4.0 + 0.3j):
        lev = leverage_neutral_cir(p, z)
        for lam in (0.3, 2.0 - 5.0j, 0.5 * (z * z + 1j * z) - 1j * (1.0 + 0.2j)):
            a = cir_integrated_laplace(lev, 1.0, lam)
            b = cir_laplace_via_ode(lev, 1.0, lam)
            worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    return worst


def _jump_oracle(jumps):
    worst = 0.0
    for z, w in ((1.0, 0.5j), (0.5 + 0.5j, 0.2 + 0.3j), (-2.0, 1.0 + 0.1j)):
        worst = max(worst, abs(psi_D(jumps, z, w) - psi_D_quadrature(jumps, z, w)))
    return worst


def wishart_diagonal_error() -> float:
    """Diagonal Q, M, lam2 = 0, z = 0: the transform is that of a CIR
    process with alpha = -2 M11, eta = 2 Q11, alpha theta = c Q11^2."""
    p = WishartParams(q=[[0.3, 0.0], [0.0, 0.5]], m=[[-1.5, 0.0], [0.0, -2.0]], c=2.5,
                      sigma0=[[0.05, 0.01], [0.01, 0.3]], rho=0.4)
    lam = np.array([0.7, 2 + 3j, -0.3 + 5j, 10.0])
    a = wishart_joint_laplace(p, 2.0, 0.0, lam, 0.0)
    alpha = -2 * p.m_mat[0, 0]
    at = p.c * p.q_mat[0, 0] ** 2
    lev = LeverageNeutralCir(alpha, at / alpha, 2 * p.q_mat[0, 0], p.sigma0_mat[0, 0], at)
    return float(np.max(np.abs(a - cir_integrated_laplace(lev, 2.0, lam))))


def wishart_small_tau_ratio(p: WishartParams) -> tuple:
    """Remainder of the first-order expansion at tau and tau/2 divided by
    tau^2; a bounded, roughly constant ratio confirms O(tau^2)."""
    lam1, lam2 = 0.8 + 0.3j, 1.5 - 0.2j
    s0 = p.sigma0_mat

    def rem(tau):
        val = wishart_joint_laplace(p, tau, 0.0, lam1, lam2)
        return abs(val - (1 - lam1 * s0[0, 0] * tau - lam2 * s0[1, 1] * tau)) / tau**2
    return rem(0.01), rem(0.005)


def wishart_branch_jump(p: WishartParams, t: float = 5.0, n: int = 400) -> float:
    """Largest increment of a(tau) between neighbouring points of a fine
    tau-grid at arguments where log det A22 winds; a 2 pi i c / 2 branch
    slip would show up as a jump of order c pi."""
    z, w = 20.0 - 0.5j, 0.5j     # Im a(5) is about -12: several windings
    lam1 = 0.5 * (z * z + 1j * z) - 1j * w
    lam2 = xi(z, w, LevySpec(0.0, 0.0, p.jumps))
    taus = np.linspace(t / n, t, n)
    a = np.array([complex(wishart_riccati(p, tt, z, lam1, lam2)[0]) for tt in taus])
    a = np.concatenate([[0.0], a])
    return float(np.max(np.abs(np.diff(a))))


def _wishart_checks(name, model):
    p = model.params
    out = []
    out.append(_res(name, "cir degeneration", wishart_diagonal_error(), 1e-8))
    r1, r2 = wishart_small_tau_ratio(p)
    # the remainder / tau^2 must stay bounded as tau halves
    out.append(_res(name, "small-tau expansion", abs(r1 - r2) / max(r1, r2), 0.1))
    out.append(_res(name, "a(tau) branch continuity", wishart_branch_jump(p), 0.5))
    z, w = _complex_grid()
    lam1 = 0.5 * (z * z + 1j * z) - 1j * w
    lam2 = xi(z, w, LevySpec(0.0, 0.0, p.jumps))
    a = wishart_joint_laplace(p, 1.0, z, lam1, lam2, method="eig")
    b = wishart_joint_laplace(p, 1.0, z, lam1, lam2, method="expm")
    out.append(_res(name, "eig vs expm route", np.max(np.abs(a - b)), 1e-8))
    return out


def run_checks(name: str, model) -> list:
    """All applicable checks for one model."""
    out = _cf_checks(name, model)
    if isinstance(model, (Heston, Bates, Fang)):
        out.append(_res(name, "cir closed form vs ode", _cir_oracle(model.cir), 1e-8))
    if isinstance(model, Fang):
        out.append(_res(name, "intensity cir vs ode", _cir_oracle(model.intensity), 1e-8))
    if isinstance(model, (Merton, Kou, Bates, Cgmy)):
        tol = 1e-6 if isinstance(model, Cgmy) else 1e-8
        out.append(_res(name, "psi_D vs quadrature", _jump_oracle(model.jumps), tol))
    if isinstance(model, Heston):
        p = replace(model.cir, theta=model.cir.v0, eta=1e-7)
        out.append(_res(name, "nesting -> black-scholes",
                        _nesting_error(Heston(p), BlackScholes(np.sqrt(p.v0))), 1e-6))
    if isinstance(model, Bates):
        out.append(_res(name, "nesting lambda=0 -> heston",
                        _nesting_error(replace(model, jumps=replace(model.jumps, lam=0.0)),
                                       Heston(model.cir)), 1e-6))
    if isinstance(model, Fang):
        lam0 = model.intensity.v0
        pinned = replace(model, intensity=replace(model.intensity, theta=lam0, eta=1e-7))
        out.append(_res(name, "nesting pinned rate -> bates",
                        _nesting_error(pinned, Bates(model.cir, replace(model.jumps, lam=lam0))),
                        1e-6))
    if isinstance(model, WishartDtc):
        out.extend(_wishart_checks(name, model))
    return out
