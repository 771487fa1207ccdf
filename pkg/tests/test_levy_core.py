import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtcpricer.errors import DomainError, ParameterError
from dtcpricer.levy_core import (CgmyJumps, DoubleExpJumps, LevySpec, NoJumps, NormalJumps,
                                 phi_joint_jump, psi_continuous, psi_D, psi_D_quadrature,
                                 psi_jump, xi, zeta)

MERTON = NormalJumps.from_kappa(-0.075, 0.0894, 1.42)
BATES = NormalJumps.from_kappa(-0.12, 0.15, 0.11)
KOU = DoubleExpJumps(0.6, 3.0, 2.0, 1.0)
CGMY = CgmyJumps(1.0, 1.0, 4.0, 4.0, 0.5, 0.5)
CGMY_NEG = CgmyJumps(0.8, 1.2, 5.0, 3.0, -0.5, 1.4)
SPECS = [MERTON, BATES, KOU, CGMY, CGMY_NEG]
IDS = ["merton", "bates", "kou", "cgmy", "cgmy-mixed"]


def test_psi_continuous_examples():
    assert psi_continuous(LevySpec(0, 1), -1j) == pytest.approx(0.5)
    assert psi_continuous(LevySpec(0, 0.14), -1j) == pytest.approx(0.0098)
    assert psi_continuous(LevySpec(1, 0), 2) == pytest.approx(2j)


def test_psi_jump_examples():
    assert psi_jump(NormalJumps(0.1, 0.2, 0.0), 1.3 - 0.2j) == 0
    assert psi_jump(MERTON, -1j) == pytest.approx(1.42 * -0.075, abs=1e-14)
    assert psi_jump(CGMY, 0) == 0
    # psi^d(-i) equals lam * kappa for every compound Poisson law
    assert psi_jump(KOU, -1j) == pytest.approx(KOU.lam * KOU.kappa, abs=1e-14)


def test_merton_mean_from_kappa():
    j = NormalJumps.from_kappa(-0.075, 0.0894)
    assert j.m == pytest.approx(np.log(0.925) - 0.0894**2 / 2, abs=1e-15)
    assert j.kappa == pytest.approx(-0.075, abs=1e-15)


def test_psi_jump_domain():
    with pytest.raises(DomainError):
        psi_jump(CGMY, -5j)
    with pytest.raises(DomainError):
        psi_jump(KOU, 2.5j)


@pytest.mark.parametrize("kw", [dict(p=1.2, alpha=3, beta=2), dict(p=0.5, alpha=0.9, beta=2),
                                dict(p=0.5, alpha=3, beta=-1)])
def test_double_exp_validation(kw):
    with pytest.raises(ParameterError):
        DoubleExpJumps(**kw)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0, 2.5])
def test_cgmy_alpha_validation(alpha):
    with pytest.raises(ParameterError):
        CgmyJumps(1, 1, 4, 4, alpha, 0.5)


def test_phi_joint_jump_examples():
    for spec in (MERTON, KOU, NormalJumps(0.1, 0.2)):
        assert phi_joint_jump(spec, 0, 0) == pytest.approx(1, abs=1e-15)
    val = phi_joint_jump(NormalJumps(0.1, 0.2), 1, 0)
    assert val == pytest.approx(np.exp(0.1j - 0.02), rel=1e-14)
    # mpmath quadrature of the defining integral
    ref = 1.18784408484663951638 + 0.0152450881854272906924j
    assert phi_joint_jump(DoubleExpJumps(0.6, 3, 2), 0.5 + 1.2j, 0.3 + 0.1j) == pytest.approx(
        ref, rel=1e-12)


def test_phi_joint_jump_domain():
    with pytest.raises(DomainError):
        phi_joint_jump(KOU, 0.3, -0.1j)
    with pytest.raises(DomainError):
        phi_joint_jump(MERTON, 0.3, -100j)


def test_psi_D_examples():
    for spec in SPECS:
        assert psi_D(spec, 0, 0) == pytest.approx(0, abs=1e-13)
    assert abs(psi_D(BATES, 1, 0.5j) - psi_D_quadrature(BATES, 1, 0.5j)) < 1e-8
    assert abs(psi_D(CGMY, 0.5j, 0.5j) - psi_D_quadrature(CGMY, 0.5j, 0.5j)) < 1e-6


def test_psi_D_quadrature_trivial():
    assert psi_D_quadrature(NormalJumps(0, 0.1, 0.0), 1.0, 0.3j) == 0
    assert abs(psi_D_quadrature(CGMY, 0, 0)) < 1e-9


def test_psi_D_normal_grid_self_consistency():
    x = np.linspace(-2, 2, 5)
    for z in x:
        for w in 0.4j + 0.5 * x:
            assert abs(psi_D(MERTON, z, w) - psi_D_quadrature(MERTON, z, w)) < 1e-8


@pytest.mark.parametrize("spec", SPECS, ids=IDS)
def test_psi_D_closed_form_vs_quadrature(spec):
    tol = 1e-6
    zs = np.linspace(-3, 3, 7) + 0.3j
    ws = np.linspace(-2, 2, 7) + 0.2j
    worst = max(abs(psi_D(spec, z, w) - psi_D_quadrature(spec, z, w)) for z in zs for w in ws)
    assert worst < tol


@pytest.mark.parametrize("spec", SPECS, ids=IDS)
def test_psi_D_hermitian_symmetry(spec):
    rng = np.random.default_rng(4)
    z = rng.uniform(-5, 5, 50) + 1j * rng.uniform(-0.9, 0.9, 50)
    w = rng.uniform(-5, 5, 50) + 1j * rng.uniform(0, 2, 50)
    lhs = psi_D(spec, -np.conj(z), -np.conj(w))
    assert np.max(np.abs(lhs - np.conj(psi_D(spec, z, w)))) < 1e-10


@pytest.mark.parametrize("spec", SPECS, ids=IDS)
def test_psi_D_reduces_to_psi_jump(spec):
    # at w = 0 the joint exponent is the exponent of X^d, up to the linear
    # compensation term for infinite-activity laws
    th = np.array([-1.5, 0.2, 2.0]) + 0.1j
    diff = psi_D(spec, th, 0) - psi_jump(spec, th)
    slope = diff / th
    assert np.max(np.abs(slope - slope[0])) < 1e-10


@pytest.mark.parametrize("jumps", [NoJumps()] + SPECS, ids=["none"] + IDS)
def test_martingale_identities(jumps):
    spec = LevySpec(0.0, 0.2, jumps)
    assert abs(xi(-1j, 0, spec)) < 1e-13
    assert zeta(-1j, 0, spec) == 0


def test_zeta_xi_examples():
    spec = LevySpec(0.0, 0.14, MERTON)
    assert zeta(0, 0, spec) == 0
    assert zeta(1, 1, spec) == pytest.approx(0.0098 * (1 - 1j), abs=1e-15)
    assert xi(0, 0, spec) == pytest.approx(0, abs=1e-15)
    phi_j = np.exp(1j * MERTON.m - 0.5 * MERTON.delta**2)
    expect = MERTON.lam * (1j * MERTON.kappa - phi_j + 1)
    assert xi(1, 0, spec) == pytest.approx(expect, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.floats(-4, 4), st.floats(-4, 4), st.floats(0, 3))
def test_psi_D_real_part_bound(x, y, wi):
    # |E exp(izJ + iwJ^2)| <= 1 for real z, Im w >= 0, so Re psi_D <= 0
    for spec in (MERTON, KOU):
        assert psi_D(spec, x, y + 1j * wi).real <= 1e-12
