"""Complex special functions and small dense matrix functions.

The error function and Gamma function delegate to scipy.special (Faddeeva
and complex log-gamma routines), wrapped so that overflow and poles raise
instead of returning inf/nan.  Kummer's confluent hypergeometric function is
implemented here because scipy only covers real arguments reliably.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.special as sc


class SpecialFunctionError(ArithmeticError):
    """Base class for evaluation failures in this module."""


class RangeError(SpecialFunctionError, OverflowError):
    """Result not representable in double precision."""


class PoleError(SpecialFunctionError, ZeroDivisionError):
    """Argument sits on a pole of the function."""


class ConvergenceError(SpecialFunctionError):
    """A series did not converge within its term cap."""


class BranchCutError(SpecialFunctionError):
    """Argument lies on the branch cut of a principal-branch function."""


def _finish(out, scalar):
    return complex(out) if scalar else out


def complex_erfc(z):
    """Complementary error function for complex arguments (array-aware)."""
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        out = sc.erfc(z)
    if not np.all(np.isfinite(out)):
        raise RangeError("erfc overflow for extreme |Im z|")
    return _finish(out, scalar)


def complex_erfcx(z):
    """Scaled complementary error function exp(z^2) erfc(z)."""
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        out = sc.erfcx(z)
    if not np.all(np.isfinite(out)):
        raise RangeError("erfcx overflow")
    return _finish(out, scalar)


def _is_nonpositive_integer(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    return (x.imag == 0) & (x.real <= 0) & (x.real == np.round(x.real))


def gamma_fn(z):
    """Euler Gamma function for complex arguments.

    Negative non-integer real arguments go through the reflection formula
    inside scipy's complex log-gamma.  Poles raise PoleError.
    """
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    if np.any(_is_nonpositive_integer(z)):
        raise PoleError("Gamma has a pole at nonpositive integers")
    out = sc.gamma(z)
    if not np.all(np.isfinite(out)):
        raise RangeError("Gamma overflow")
    return _finish(out, scalar)


# ---------------------------------------------------------------------------
# Confluent hypergeometric function 1F1(a; b; z)

_R_SERIES = 12.0   # plain series radius (for Re z >= 0)
_R_ASYM = 40.0     # asymptotic expansion from here on
_STEP = 4.0        # Taylor step length for the ODE continuation
_EPS = 1e-17


def _series(a, b, z, max_terms, deriv=False):
    """Raw Maclaurin series of 1F1 (no transformation).  Returns (M, M')."""
    z = np.asarray(z, dtype=complex)
    term = np.ones_like(z)
    total = np.ones_like(z)
    dtotal = np.zeros_like(z)
    active = np.ones(z.shape, dtype=bool)
    n = 0
    while np.any(active):
        if n >= max_terms:
            raise ConvergenceError(f"1F1 series did not converge in {max_terms} terms")
        term = term * (a + n) / (b + n) * z / (n + 1)
        n += 1
        total = total + np.where(active, term, 0)
        if deriv:
            dtotal = dtotal + np.where(active, n * term, 0)
        small = np.abs(term) <= _EPS * np.abs(total)
        active &= ~(small & (n > np.abs(z)))
        active &= term != 0
    if deriv:
        with np.errstate(invalid="ignore", divide="ignore"):
            d = np.where(z != 0, dtotal / np.where(z != 0, z, 1), a / b)
        return total, d
    return total, None


def _asymptotic(a, b, z, max_terms=120):
    """Large-|z| expansion (DLMF 13.7.2), valid here for Re z >= 0.

    Returns (value, ok) where ok flags elements whose smallest term reached
    double precision.
    """
    s1 = np.ones_like(z)
    s2 = np.ones_like(z)
    t1 = np.ones_like(z)
    t2 = np.ones_like(z)
    live1 = np.ones(z.shape, dtype=bool)
    live2 = np.ones(z.shape, dtype=bool)
    for s in range(max_terms):
        n1 = t1 * (b - a + s) * (1 - a + s) / ((s + 1) * z)
        n2 = t2 * (a + s) * (a - b + 1 + s) / ((s + 1) * (-z))
        grow1 = np.abs(n1) > np.abs(t1)
        grow2 = np.abs(n2) > np.abs(t2)
        live1 &= ~grow1
        live2 &= ~grow2
        s1 = s1 + np.where(live1, n1, 0)
        s2 = s2 + np.where(live2, n2, 0)
        t1 = np.where(live1, n1, t1)
        t2 = np.where(live2, n2, t2)
        live1 &= np.abs(t1) > _EPS * np.abs(s1)
        live2 &= np.abs(t2) > _EPS * np.abs(s2)
        if not (np.any(live1) or np.any(live2)):
            break
    ok = (np.abs(t1) <= 1e-14 * np.maximum(np.abs(s1), 1e-300)) | (t1 == 0)
    ok &= (np.abs(t2) <= 1e-14 * np.maximum(np.abs(s2), 1e-300)) | (t2 == 0)
    # Stokes switch: + branch for Im z >= 0, - branch below the real axis
    phase = np.where(z.imag >= 0, np.exp(1j * np.pi * a), np.exp(-1j * np.pi * a))
    logz = np.log(z)
    val = sc.gamma(b) * (
        np.exp(z + (a - b) * logz) * sc.rgamma(a) * s1
        + phase * np.exp(-a * logz) * sc.rgamma(b - a) * s2
    )
    return val, ok


def _taylor_continue(a, b, z, max_terms):
    """Continue 1F1 from radius _R_SERIES out to z by Taylor steps of the ODE
    z M'' + (b - z) M' - a M = 0 along the ray through z."""
    r = np.abs(z)
    unit = z / r
    z0 = _R_SERIES * unit
    m, dm = _series(a, b, z0, max_terms, deriv=True)
    nsteps = int(np.ceil(np.max((r - _R_SERIES) / _STEP)))
    h = (z - z0) / nsteps
    cur = z0
    for _ in range(nsteps):
        c_prev, c_cur = m, dm
        total = m + dm * h
        dtotal = dm.copy()
        hp = h.copy()   # h^(n+1) for c_{n+1}
        n = 0
        live = np.ones(z.shape, dtype=bool)
        while np.any(live):
            if n >= max_terms:
                raise ConvergenceError("1F1 Taylor continuation did not converge")
            c_next = ((n + a) * c_prev - (n + 1) * (n + b - cur) * c_cur) / (
                cur * (n + 1) * (n + 2))
            dtotal = dtotal + np.where(live, (n + 2) * c_next * hp, 0)
            hp = hp * h
            term = c_next * hp
            total = total + np.where(live, term, 0)
            live &= ~((np.abs(term) <= _EPS * np.abs(total)) & (n > 8))
            c_prev, c_cur = c_cur, c_next
            n += 1
        m, dm = total, dtotal
        cur = cur + h
    return m


def _m_right(a, b, z, max_terms):
    """1F1 for Re z >= 0."""
    out = np.empty_like(z)
    r = np.abs(z)
    small = r <= _R_SERIES
    if np.any(small):
        out[small] = _series(a, b, z[small], max_terms)[0]
    big = r >= _R_ASYM
    if np.any(big):
        val, ok = _asymptotic(a, b, z[big])
        idx = np.flatnonzero(big)
        out[idx[ok]] = val[ok]
        big[idx[~ok]] = False
    mid = ~small & ~big
    if np.any(mid):
        out[mid] = _taylor_continue(a, b, z[mid], max_terms)
    return out


def hyp1f1(a, b, z, max_terms: int = 10_000):
    """Kummer's confluent hypergeometric function 1F1(a; b; z).

    a and b are complex scalars, z may be an array.  For Re z < 0 the Kummer
    transformation 1F1(a;b;z) = e^z 1F1(b-a;b;-z) is applied first.  Small
    |z| uses the power series, large |z| the asymptotic expansion, and the
    band in between Taylor-steps the Kummer ODE outward from the series disc
    so that no single sum suffers heavy cancellation.
    """
    a = complex(a)
    b = complex(b)
    if _is_nonpositive_integer(b):
        raise PoleError("1F1 undefined for b a nonpositive integer")
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex)).copy()
    shape = z.shape
    z = z.ravel()
    out = np.empty_like(z)
    neg = z.real < 0
    if np.any(~neg):
        out[~neg] = _m_right(a, b, z[~neg], max_terms)
    if np.any(neg):
        zn = z[neg]
        out[neg] = np.exp(zn) * _m_right(b - a, b, -zn, max_terms)
    if not np.all(np.isfinite(out)):
        raise RangeError("1F1 overflow")
    out = out.reshape(shape)
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Matrix functions

def mat_exp(m):
    """Matrix exponential (scaling and squaring with Pade), batched over
    leading axes."""
    m = np.asarray(m, dtype=complex)
    return scipy.linalg.expm(m)


def mat_log_principal(m):
    """Principal matrix logarithm, batched over leading axes.

    Raises BranchCutError if an eigenvalue lies on the closed negative real
    axis.  Diagonalizable matrices go through the eigendecomposition;
    defective ones fall back to scipy.linalg.logm.
    """
    m = np.asarray(m, dtype=complex)
    lam, vec = np.linalg.eig(m)
    tiny = 1e-14 * np.maximum(np.abs(lam), 1e-300)
    if np.any((np.abs(lam.imag) <= tiny) & (lam.real <= 0)):
        raise BranchCutError("eigenvalue on the closed negative real axis")
    out = np.empty_like(m)
    cond = np.linalg.cond(vec)
    good = np.isfinite(cond) & (cond < 1e10)
    if np.any(good):
        v = vec[good]
        out[good] = v @ (np.log(lam[good])[..., :, None] * np.linalg.inv(v))
    if np.any(~good):
        flat_idx = np.argwhere(~good) if m.ndim > 2 else [()]
        for idx in flat_idx:
            idx = tuple(idx)
            out[idx] = scipy.linalg.logm(m[idx])
    return out
