"""Joint Laplace transform of the integrated diagonal of a 2x2 Wishart
process under the leverage-neutral drift shift M^z = M + i z Q^T R.

With D = diag(lam1, lam2) the matrix Riccati solution is read off the
linearised 4x4 flow

    [A21(t), A22(t)] = [0, I] exp(t H),   H = [[M^z, 2 Q^T Q], [D, -(M^z)^T]],
    A = A22^{-1} A21,   a = (c/2) (log det A22 + t Tr M^z),

and E[exp(-lam1 int S11 - lam2 int S22)] = exp(-a - Tr(A Sigma0)).

Two evaluation routes are provided.  "eig" diagonalises H once and factors
the growing exponentials out analytically, so no entry ever overflows; the
determinant's phase is unwrapped along a t-grid starting from A22(0) = I.
"expm" propagates the flow in short steps with the matrix exponential and
accumulates principal logarithms step by step.  The routes share no code
beyond building H and serve as mutual checks.
"""
from __future__ import annotations

import numpy as np

from ..errors import DomainError
from ..special_functions import mat_exp, mat_log_principal
from .params import WishartParams


def hamiltonian(p: WishartParams, z, lam1, lam2):
    z, lam1, lam2 = np.broadcast_arrays(np.asarray(z, complex), np.asarray(lam1, complex),
                                        np.asarray(lam2, complex))
    q = p.q_mat
    qtq = q.T @ q
    mz = p.m_mat + 1j * z[..., None, None] * (q.T @ p.r_mat)
    h = np.zeros(z.shape + (4, 4), dtype=complex)
    h[..., :2, :2] = mz
    h[..., :2, 2:] = 2 * qtq
    h[..., 2, 0] = lam1
    h[..., 3, 1] = lam2
    h[..., 2:, 2:] = -np.swapaxes(mz, -1, -2)
    return h, mz


def _det2(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def _solve_expm(h, tau, max_step_norm=0.5):
    """Stepped propagation; returns (A, log det A22)."""
    norm = np.max(np.sum(np.abs(h), axis=-1), axis=-1)
    n = max(1, int(np.ceil(tau * np.max(norm) / max_step_norm)))
    e = mat_exp(h * (tau / n))
    e11, e12 = e[..., :2, :2], e[..., :2, 2:]
    e21, e22 = e[..., 2:, :2], e[..., 2:, 2:]
    a = np.zeros(h.shape[:-2] + (2, 2), dtype=complex)
    logdet = np.zeros(h.shape[:-2], dtype=complex)
    for _ in range(n):
        dn = a @ e12 + e22
        logdet = logdet + np.trace(mat_log_principal(dn), axis1=-2, axis2=-1)
        a = np.linalg.solve(dn, a @ e11 + e21)
    return a, logdet


def _solve_eig(h, tau):
    """Eigen-route; returns (A, log det A22, ok mask)."""
    lam, vec = np.linalg.eig(h)
    order = np.argsort(-lam.real, axis=-1)
    lam = np.take_along_axis(lam, order, axis=-1)
    vec = np.take_along_axis(vec, order[..., None, :], axis=-1)
    lp, lm = lam[..., :2], lam[..., 2:]
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(vec)
        winv = np.linalg.inv(vec)
        up, um = vec[..., 2:, :2], vec[..., 2:, 2:]
        wp, wm = winv[..., :2, :], winv[..., 2:, :]
        det_up = _det2(up)
        ok = (np.isfinite(cond) & (cond < 1e8) & (np.abs(det_up) > 1e-10)
              & (lp[..., 1].real - lm[..., 0].real > 1e-9))
        safe_up = np.where(ok[..., None, None], up, np.eye(2))
        cmat = np.linalg.solve(safe_up, um)

    def xmat(t):
        ex = np.exp(-t * lp)[..., :, None] * cmat * np.exp(t * lm)[..., None, :]
        return wp + ex @ wm

    # t-grid fine enough that the determinant's phase moves < pi/4 per step
    rate = np.max(np.where(ok[..., None], np.abs(lam), 0.0)) if np.any(ok) else 0.0
    n = int(min(4096, max(16, np.ceil(8 * rate * tau / np.pi))))
    prev = det_up * _det2(xmat(0.0)[..., :, 2:])
    phase = np.angle(prev)  # ~0 since Up X2(0) = I
    for k in range(1, n + 1):
        cur = det_up * _det2(xmat(tau * k / n)[..., :, 2:])
        with np.errstate(all="ignore"):
            phase = phase + np.angle(cur / prev)
        prev = cur
    xt = xmat(tau)
    x1, x2 = xt[..., :, :2], xt[..., :, 2:]
    with np.errstate(all="ignore"):
        safe_x2 = np.where(ok[..., None, None], x2, np.eye(2))
        a = np.linalg.solve(safe_x2, x1)
        logdet = tau * np.sum(lp, axis=-1) + np.log(np.abs(prev)) + 1j * phase
    ok &= np.isfinite(logdet) & np.all(np.isfinite(a), axis=(-2, -1))
    return a, logdet, ok


def wishart_riccati(p: WishartParams, tau: float, z, lam1, lam2, method: str = "auto"):
    """Return (a, A) with E = exp(-a - Tr(A Sigma0))."""
    h, mz = hamiltonian(p, z, lam1, lam2)
    tr_mz = np.trace(mz, axis1=-2, axis2=-1)
    shape = h.shape[:-2]
    hf = h.reshape((-1, 4, 4))
    trf = tr_mz.reshape(-1)
    if method == "expm":
        a_mat, logdet = _solve_expm(hf, tau)
    elif method in ("eig", "auto"):
        a_mat, logdet, ok = _solve_eig(hf, tau)
        if not np.all(ok):
            if method == "eig":
                raise DomainError("Hamiltonian eigen-split ill-conditioned")
            bad = ~ok
            a_b, l_b = _solve_expm(hf[bad], tau)
            a_mat[bad] = a_b
            logdet[bad] = l_b
    else:
        raise ValueError(f"unknown method {method!r}")
    if not (np.all(np.isfinite(logdet)) and np.all(np.isfinite(a_mat))):
        raise DomainError("A22 singular: Wishart transform outside its strip")
    small_a = 0.5 * p.c * (logdet + tau * trf)
    return small_a.reshape(shape), a_mat.reshape(shape + (2, 2))


def wishart_joint_laplace(p: WishartParams, tau: float, z, lam1, lam2, method: str = "auto"):
    """E^{Q(z)}[exp(-lam1 int S11 - lam2 int S22)] under the leverage-neutral
    drift M^z."""
    a, amat = wishart_riccati(p, tau, z, lam1, lam2, method)
    val = np.exp(-a - np.einsum("...ij,ji->...", amat, p.sigma0_mat))
    return complex(val) if np.ndim(val) == 0 else val


def wishart_explodes(p: WishartParams, tau: float, zi: float, lam1: float, lam2: float,
                     n_grid: int = 200) -> bool:
    """Real-argument explosion test along (0, tau]: det A22(t) must stay > 0.
    zi is Im(z) for purely imaginary z (so M^z is real)."""
    h, _ = hamiltonian(p, 1j * zi, lam1, lam2)
    h = h.real
    step = mat_exp(h * (tau / n_grid)).real
    # Propagate only the columns exp(H t)[:, 2:], re-orthonormalized by QR so
    # that the spread of growth rates in exp(-M^T t) cannot wash out the
    # determinant; det A22 = det(bottom of Q) * prod det(R).
    cols = np.vstack([np.zeros((2, 2)), np.eye(2)])
    sign = 1.0
    for _ in range(n_grid):
        cols, r = np.linalg.qr(step @ cols)
        sign *= np.sign(np.linalg.det(r))
        d = sign * np.linalg.det(cols[2:])
        if not np.isfinite(d) or d <= 0:
            return True
    return False


def activity_rate_correlation(p: WishartParams, sigma_t) -> float:
    """Instantaneous correlation between the drivers of S11 and S22:
    S12 (Q11 Q12 + Q21 Q22) / sqrt(S11 (Q11^2 + Q21^2) S22 (Q12^2 + Q22^2))."""
    s = np.asarray(sigma_t, dtype=float)
    q = p.q_mat
    if s[0, 0] <= 0 or s[1, 1] <= 0:
        raise DomainError("activity-rate correlation needs S11, S22 > 0")
    num = s[0, 1] * (q[0, 0] * q[0, 1] + q[1, 0] * q[1, 1])
    den = np.sqrt(s[0, 0] * (q[0, 0] ** 2 + q[1, 0] ** 2) * s[1, 1] * (q[0, 1] ** 2 + q[1, 1] ** 2))
    return float(num / den)
