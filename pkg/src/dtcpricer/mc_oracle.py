"""Monte Carlo oracle: Euler simulation of (log S, TV, activity states)
under the risk-neutral dynamics of every model.

Each step is split into draw_step (all randomness) and step (a
deterministic update given the draws), so single increments can be
checked by hand.  Paths are simulated in fixed-size blocks; block b uses
its own Philox stream keyed by (seed, b), and per-block sums are reduced in
block order, so results do not depend on the worker count.
"""
from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
import scipy.integrate as si

from .errors import ParameterError
from .levy_core import CgmyJumps, DoubleExpJumps, NormalJumps
from .models import Bates, BlackScholes, Cgmy, Fang, Heston, Kou, Merton, WishartDtc
from .payoffs import TvoCall, payoff_value

BLOCK_SIZE = 8192
CGMY_EPS = 0.01   # jumps below this size are replaced by a Brownian motion


@dataclass(frozen=True)
class McConfig:
    n_paths: int = 100_000
    n_steps: int = 1_000
    seed: int = 0
    antithetic: bool = False
    threads: Optional[int] = None   # None: all available cores

    def __post_init__(self):
        if self.n_paths < 1 or self.n_steps < 1:
            raise ParameterError("n_paths and n_steps must be at least 1")


@dataclass(frozen=True)
class McResult:
    price: float
    std_err: float
    n_degenerate: int = 0
    n_used: int = 0
    insufficient: bool = False   # fewer than two usable paths: std_err meaningless


@dataclass
class PathState:
    """Vectorised over paths.  rates holds the activity states present in
    the model: 'v' (CIR variance), 'lam' (jump intensity), 'sigma' (n, 2, 2)."""
    log_s: np.ndarray
    tv: np.ndarray
    rates: dict = field(default_factory=dict)
    clipped: int = 0   # Wishart steps that needed an eigenvalue clip


def initial_state(model, n: int, spot: float = 1.0, accrued_tv: float = 0.0) -> PathState:
    log_s = np.full(n, np.log(spot))
    tv = np.full(n, float(accrued_tv))
    rates = {}
    if isinstance(model, (Heston, Bates, Fang)):
        rates["v"] = np.full(n, model.cir.v0)
    if isinstance(model, Fang):
        rates["lam"] = np.full(n, model.intensity.v0)
    if isinstance(model, WishartDtc):
        rates["sigma"] = np.broadcast_to(model.params.sigma0_mat, (n, 2, 2)).copy()
    return PathState(log_s, tv, rates)


# ---------------------------------------------------------------------------
# jump laws

def _cgmy_side(c, beta, alpha, eps):
    """(intensity of jumps > eps, E[e^x | x > eps] up to sign handled by the
    caller, small-jump variance) for one half-line of the Levy measure."""
    dens = lambda x: c * np.exp(-beta * x) * x ** (-1 - alpha)
    lam_big = si.quad(dens, eps, np.inf, limit=200)[0]
    var_small = si.quad(lambda x: x * x * dens(x), 0, eps, limit=200)[0]
    return lam_big, var_small


@lru_cache(maxsize=32)
def cgmy_approximation(jumps: CgmyJumps, eps: float = CGMY_EPS):
    """Parameters of the simulated approximation: big-jump intensities and
    exponential moments per side, small-jump variance and the drift making
    exp(X) a martingale."""
    out = {}
    var = 0.0
    comp = 0.0
    for name, (c, beta, alpha, sign) in zip(("plus", "minus"), jumps.sides()):
        lam, v = _cgmy_side(c, beta, alpha, eps)
        ex = si.quad(lambda x: c * np.exp((sign - beta) * x) * x ** (-1 - alpha),
                     eps, np.inf, limit=200)[0]
        out[name] = (lam, c, beta, alpha)
        var += v
        comp += ex - lam
    out["var_small"] = var
    out["drift"] = -0.5 * var - comp
    return out


def _sample_tempered(rng, n, beta, alpha, eps):
    """n draws from the density prop. to e^{-beta x} x^{-1-alpha} on (eps, inf)."""
    out = np.empty(n)
    filled = 0
    while filled < n:
        m = n - filled
        if alpha > 0:
            x = eps * rng.random(m) ** (-1.0 / alpha)     # Pareto proposal
            ok = rng.random(m) < np.exp(-beta * (x - eps))
        else:
            x = rng.gamma(-alpha, 1.0 / beta, m)          # exact shape, truncated below
            ok = x > eps
        x = x[ok]
        out[filled:filled + x.size] = x
        filled += x.size
    return out


def _sample_jumps(rng, jumps, k):
    if isinstance(jumps, NormalJumps):
        return jumps.m + jumps.delta * rng.standard_normal(k)
    if isinstance(jumps, DoubleExpJumps):
        up = rng.random(k) < jumps.p
        e = rng.standard_exponential(k)
        return np.where(up, e / jumps.alpha, -e / jumps.beta)
    raise TypeError(f"no sampler for {jumps!r}")


def _compound(rng, counts, sampler):
    """Per-path sums of jumps and squared jumps given Poisson counts."""
    n = counts.size
    k = int(counts.sum())
    if k == 0:
        return np.zeros(n), np.zeros(n)
    idx = np.repeat(np.arange(n), counts)
    j = sampler(k)
    return np.bincount(idx, j, minlength=n), np.bincount(idx, j * j, minlength=n)


# ---------------------------------------------------------------------------
# one Euler step

def _normals(rng, k, n, antithetic):
    if not antithetic:
        return rng.standard_normal((k, n))
    h = (n + 1) // 2
    z = rng.standard_normal((k, h))
    return np.concatenate([z, -z], axis=1)[:, :n]


def _n_normals(model):
    if isinstance(model, (BlackScholes, Merton, Kou, Cgmy)):
        return 1
    if isinstance(model, (Heston, Bates)):
        return 2
    if isinstance(model, Fang):
        return 3
    if isinstance(model, WishartDtc):
        return 6
    raise TypeError(f"unknown model {model!r}")


def draw_step(model, state: PathState, dt: float, rng, antithetic: bool = False) -> dict:
    """All random inputs of one step.  'xi' holds standard normals (k, n);
    'jump_sum' and 'jump_sq' the summed jumps and squared jumps."""
    n = state.log_s.size
    draws = {"xi": _normals(rng, _n_normals(model), n, antithetic)}
    if isinstance(model, (Merton, Kou, Bates)):
        counts = rng.poisson(model.jumps.lam * dt, n)
        draws["jump_sum"], draws["jump_sq"] = _compound(
            rng, counts, lambda k: _sample_jumps(rng, model.jumps, k))
    elif isinstance(model, Fang):
        counts = rng.poisson(np.maximum(state.rates["lam"], 0) * dt)
        draws["jump_sum"], draws["jump_sq"] = _compound(
            rng, counts, lambda k: _sample_jumps(rng, model.jumps, k))
    elif isinstance(model, WishartDtc):
        counts = rng.poisson(np.maximum(state.rates["sigma"][:, 1, 1], 0) * dt)
        draws["jump_sum"], draws["jump_sq"] = _compound(
            rng, counts, lambda k: _sample_jumps(rng, model.params.jumps, k))
    elif isinstance(model, Cgmy):
        ap = cgmy_approximation(model.jumps)
        s = np.zeros(n)
        sq = np.zeros(n)
        for name, sign in (("plus", 1.0), ("minus", -1.0)):
            lam, _c, beta, alpha = ap[name]
            counts = rng.poisson(lam * dt, n)
            a, b = _compound(rng, counts,
                             lambda k: sign * _sample_tempered(rng, k, beta, alpha, CGMY_EPS))
            s += a
            sq += b
        draws["jump_sum"], draws["jump_sq"] = s, sq
    return draws


def _sqrtm_psd(a, b, d):
    """Closed-form square root of symmetric PSD 2x2 matrices [[a, b], [b, d]];
    returns the entries (r11, r12, r22)."""
    sd = np.sqrt(np.maximum(a * d - b * b, 0.0))
    t = np.sqrt(np.maximum(a + d + 2 * sd, 1e-300))
    return (a + sd) / t, b / t, (d + sd) / t


def _project_psd(a, b, d):
    """Clip negative eigenvalues of [[a, b], [b, d]]; returns the (n, 2, 2)
    matrices and the number of clipped entries."""
    out = np.empty(a.shape + (2, 2))
    out[:, 0, 0], out[:, 0, 1], out[:, 1, 0], out[:, 1, 1] = a, b, b, d
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * b)
    bad = 0.5 * (a + d) - disc < 0
    if not np.any(bad):
        return out, 0
    vals, vecs = np.linalg.eigh(out[bad])
    vals = np.maximum(vals, 0.0)
    out[bad] = np.einsum("nij,nj,nkj->nik", vecs, vals, vecs)
    return out, int(bad.sum())


def step(model, state: PathState, dt: float, draws: dict, rate: float = 0.0) -> PathState:
    """One Euler increment of (log S, TV, rates) given the draws."""
    xi = draws["xi"]
    jsum = draws.get("jump_sum", 0.0)
    jsq = draws.get("jump_sq", 0.0)
    sq = np.sqrt(dt)
    rates = dict(state.rates)
    clipped = state.clipped

    if isinstance(model, BlackScholes):
        s2 = model.sigma**2
        dx = (rate - 0.5 * s2) * dt + model.sigma * sq * xi[0]
        dtv = s2 * dt
    elif isinstance(model, (Merton, Kou)):
        s2 = model.sigma**2
        dx = ((rate - 0.5 * s2 - model.jumps.lam * model.jumps.kappa) * dt
              + model.sigma * sq * xi[0] + jsum)
        dtv = s2 * dt + jsq
    elif isinstance(model, Cgmy):
        ap = cgmy_approximation(model.jumps)
        dx = (rate + ap["drift"]) * dt + np.sqrt(ap["var_small"]) * sq * xi[0] + jsum
        dtv = ap["var_small"] * dt + jsq
    elif isinstance(model, (Heston, Bates, Fang)):
        p = model.cir
        v = state.rates["v"]
        vp = np.maximum(v, 0.0)
        sv = np.sqrt(vp * dt)
        if isinstance(model, Heston):
            comp = 0.0
        elif isinstance(model, Bates):
            comp = model.jumps.lam * model.jumps.kappa
        else:
            comp = np.maximum(state.rates["lam"], 0.0) * model.jumps.kappa
        dx = (rate - 0.5 * vp - comp) * dt + sv * xi[0] + jsum
        dtv = vp * dt + jsq
        w2 = p.rho * xi[0] + np.sqrt(1 - p.rho**2) * xi[1]
        rates["v"] = v + p.alpha * (p.theta - vp) * dt + p.eta * sv * w2
        if isinstance(model, Fang):
            ip = model.intensity
            lam = state.rates["lam"]
            lp = np.maximum(lam, 0.0)
            rates["lam"] = lam + ip.alpha * (ip.theta - lp) * dt + ip.eta * np.sqrt(lp * dt) * xi[2]
    elif isinstance(model, WishartDtc):
        p = model.params
        sig = state.rates["sigma"]
        a, b, d = sig[:, 0, 0], sig[:, 0, 1], sig[:, 1, 1]
        r11, r12, r22 = _sqrtm_psd(a, b, d)
        w1, w2 = xi[0] * sq, xi[1] * sq          # price drivers W^1, W^2
        c = np.sqrt(1 - p.rho**2)
        # B^{j,1} correlated with W^j, B^{j,2} independent
        b11, b21 = p.rho * w1 + c * xi[2] * sq, p.rho * w2 + c * xi[3] * sq
        b12, b22 = xi[4] * sq, xi[5] * sq
        s11 = np.maximum(a, 0.0)
        dx = ((rate - 0.5 * s11 - np.maximum(d, 0.0) * p.jumps.kappa) * dt
              + r11 * w1 + r12 * w2 + jsum)
        dtv = s11 * dt + jsq
        q, m = p.q_mat, p.m_mat
        # G = sqrt(Sigma) dB, N = G Q; increment N + N^T
        g11, g12 = r11 * b11 + r12 * b21, r11 * b12 + r12 * b22
        g21, g22 = r12 * b11 + r22 * b21, r12 * b12 + r22 * b22
        n11 = g11 * q[0, 0] + g12 * q[1, 0]
        n12 = g11 * q[0, 1] + g12 * q[1, 1]
        n21 = g21 * q[0, 0] + g22 * q[1, 0]
        n22 = g21 * q[0, 1] + g22 * q[1, 1]
        cqq = p.c * (q.T @ q)
        # M Sigma + Sigma M^T
        ms11 = m[0, 0] * a + m[0, 1] * b
        ms12 = m[0, 0] * b + m[0, 1] * d
        ms21 = m[1, 0] * a + m[1, 1] * b
        ms22 = m[1, 0] * b + m[1, 1] * d
        na = a + (2 * ms11 + cqq[0, 0]) * dt + 2 * n11
        nb = b + (ms12 + ms21 + cqq[0, 1]) * dt + n12 + n21
        nd = d + (2 * ms22 + cqq[1, 1]) * dt + 2 * n22
        new, nclip = _project_psd(na, nb, nd)
        rates["sigma"] = new
        clipped += nclip
    else:
        raise TypeError(f"unknown model {model!r}")
    return PathState(state.log_s + dx, state.tv + dtv, rates, clipped)


# ---------------------------------------------------------------------------
# drivers

def _block_sizes(n_paths):
    full, rest = divmod(n_paths, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def _simulate_block(model, mkt, tau, cfg: McConfig, block: int, n: int) -> PathState:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, block])))
    state = initial_state(model, n, mkt.spot, mkt.accrued_tv)
    dt = tau / cfg.n_steps
    for _ in range(cfg.n_steps):
        state = step(model, state, dt, draw_step(model, state, dt, rng, cfg.antithetic), mkt.rate)
    return state


def simulate(model, mkt, tau: float, cfg: McConfig, reducer):
    """Run all blocks and return [reducer(block_state) for each block] in
    block order."""
    sizes = _block_sizes(cfg.n_paths)
    workers = cfg.threads or os.cpu_count() or 1

    def job(b):
        return reducer(_simulate_block(model, mkt, tau, cfg, b, sizes[b]))

    if workers == 1 or len(sizes) == 1:
        return [job(b) for b in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(job, range(len(sizes))))


def _check_tau(mkt, maturity):
    tau = maturity - mkt.t0
    if not tau > 0:
        raise ParameterError("contract maturity must exceed t0")
    return tau


def _finish(s1, s2, n, disc, n_deg):
    if n == 0:
        return McResult(float("nan"), float("nan"), n_deg, 0, True)
    mean = s1 / n
    if n < 2:
        return McResult(float(disc * mean), 0.0, n_deg, n, True)
    var = max(s2 - n * mean * mean, 0.0) / (n - 1)
    return McResult(float(disc * mean), float(disc * np.sqrt(var / n)), n_deg, n)


def mc_price_many(model, mkt, contracts, cfg: McConfig = McConfig()):
    """Prices of several contracts with a common maturity from one set of
    paths."""
    contracts = list(contracts)
    mats = {c.maturity for c in contracts}
    if len(mats) != 1:
        raise ParameterError("contracts must share a maturity")
    tau = _check_tau(mkt, mats.pop())

    def reduce(state):
        out = []
        for c in contracts:
            if isinstance(c, TvoCall):
                good = state.tv > 0
                pay = payoff_value(c, state.log_s[good], state.tv[good])
                n_deg = int((~good).sum())
            else:
                pay = np.atleast_1d(payoff_value(c, state.log_s, state.tv))
                n_deg = 0
            out.append((np.sum(pay), np.sum(pay * pay), pay.size, n_deg))
        return out

    blocks = simulate(model, mkt, tau, cfg, reduce)
    disc = np.exp(-mkt.rate * tau)
    results = []
    for i, c in enumerate(contracts):
        parts = np.array([b[i] for b in blocks], dtype=float)
        s1, s2, n, n_deg = np.sum(parts, axis=0)
        res = _finish(s1, s2, int(n), disc, int(n_deg))
        if n_deg > 1e-3 * cfg.n_paths:
            warnings.warn(f"{int(n_deg)} zero-variance paths excluded from the TVO average")
        results.append(res)
    return results


def mc_price(model, mkt, c, cfg: McConfig = McConfig()) -> McResult:
    """Discounted mean payoff and its standard error."""
    return mc_price_many(model, mkt, [c], cfg)[0]


def mc_joint_cf(model, mkt, t: float, z, w, cfg: McConfig = McConfig()):
    """Sample mean of exp(i z dlog S~ + i w dTV) over [t0, t] for real (z, w)
    (arrays broadcast).  Returns (estimate, std_err) with std_err the
    standard error of the complex mean, sqrt(Var Re + Var Im) / sqrt(n)."""
    tau = _check_tau(mkt, t)
    z, w = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
    if np.any(z.imag != 0) or np.any(w.imag != 0):
        bounded = np.all(z.imag <= 0) and np.all(w.imag >= 0)
        if not bounded:
            warnings.warn("complex arguments: the sample mean may have infinite variance")
    zf, wf = z.ravel(), w.ravel()
    x0 = np.log(mkt.spot) + mkt.rate * tau

    def reduce(state):
        dx = state.log_s - x0
        dtv = state.tv - mkt.accrued_tv
        e = np.exp(1j * (dx[:, None] * zf[None, :] + dtv[:, None] * wf[None, :]))
        return (e.sum(axis=0), (e.real**2).sum(axis=0), (e.imag**2).sum(axis=0), dx.size)

    blocks = simulate(model, mkt, tau, cfg, reduce)
    s = np.sum([b[0] for b in blocks], axis=0)
    sr = np.sum([b[1] for b in blocks], axis=0)
    si_ = np.sum([b[2] for b in blocks], axis=0)
    n = sum(b[3] for b in blocks)
    mean = s / n
    if n < 2:
        se = np.zeros(mean.shape)
    else:
        var = (np.maximum(sr - n * mean.real**2, 0)
               + np.maximum(si_ - n * mean.imag**2, 0)) / (n - 1)
        se = np.sqrt(var / n)
    mean = mean.reshape(z.shape)
    se = se.reshape(z.shape)
    if mean.ndim == 0:
        return complex(mean), float(se)
    return mean, se
