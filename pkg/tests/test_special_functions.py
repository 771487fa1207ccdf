import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtcpricer.special_functions import (BranchCutError, PoleError, RangeError, complex_erfc,
                                         gamma_fn, hyp1f1, mat_exp, mat_log_principal)
from dtcpricer import special_functions as sf

# reference values from mpmath at 40 digits
ERFC_REF = {
    1.0: 0.15729920705028513066,
    0.3 + 0.7j: 0.47883899513985031314 - 0.83091097636835162277j,
    2.5 - 1.5j: -0.00048441457457472489 + 0.0034035003087279405083j,
    -1 + 3j: -329.81538696857207651 - 443.38888183939279850j,
}
HYP_REF = [
    ((-0.75, 0.5, 2 + 1j), -2.3651207207906118881 - 2.3315254437045746604j),
    ((0.3 + 0.2j, 1.7, 60 + 30j), 8.8789295146090120058e22 - 6.2829648334175261263e22j),
    ((-0.4, -1.5, -35 + 5j), 0.98639523623112896726 - 0.059650859093941623267j),
    ((1.2, 2.6, 25j), -0.021569677944667963260 + 0.019833729162015841816j),
]
GAMMA_REF = {
    -1.3 + 0.4j: 1.0886618631201538597 + 1.1127803316768319191j,
    -0.7: -4.2736699824108433611,
    3.2 - 4.1j: 0.080722885888056852060 + 0.19805219804303125966j,
}


def rel(a, b):
    return abs(a - b) / abs(b)


def test_erfc_examples():
    assert complex_erfc(0) == 1
    for z, ref in ERFC_REF.items():
        assert rel(complex_erfc(z), ref) < 1e-12
    z = 0.3 + 0.7j
    assert complex_erfc(np.conj(z)) == pytest.approx(np.conj(complex_erfc(z)), rel=1e-14)


def test_erfc_reflection():
    rng = np.random.default_rng(3)
    z = rng.uniform(-4, 4, 200) + 1j * rng.uniform(-4, 4, 200)
    assert np.max(np.abs(complex_erfc(z) + complex_erfc(-z) - 2)) < 1e-11


def test_erfc_overflow_is_range_error():
    with pytest.raises(RangeError):
        complex_erfc(1j * 40.0)


def test_gamma_examples():
    assert gamma_fn(1) == pytest.approx(1, rel=1e-14)
    assert gamma_fn(0.5) == pytest.approx(np.sqrt(np.pi), rel=1e-13)
    assert gamma_fn(-0.5) == pytest.approx(-2 * np.sqrt(np.pi), rel=1e-13)
    for z, ref in GAMMA_REF.items():
        assert rel(gamma_fn(z), ref) < 1e-12


@pytest.mark.parametrize("z", [0, -1, -4, -1 + 0j])
def test_gamma_poles(z):
    with pytest.raises(PoleError):
        gamma_fn(z)


def test_gamma_recurrence():
    rng = np.random.default_rng(7)
    z = rng.uniform(-5, 5, 100) + 1j * rng.uniform(-5, 5, 100)
    lhs = gamma_fn(z + 1)
    rhs = z * gamma_fn(z)
    assert np.max(np.abs(lhs - rhs) / np.abs(rhs)) < 1e-10


def test_hyp1f1_examples():
    assert hyp1f1(0.3 - 0.1j, 2.2, 0) == 1
    assert hyp1f1(1, 1, 0.5) == pytest.approx(np.exp(0.5), rel=1e-14)
    for (a, b, z), ref in HYP_REF:
        assert rel(hyp1f1(a, b, z), ref) < 1e-10


def test_hyp1f1_pole_and_cap():
    with pytest.raises(PoleError):
        hyp1f1(0.5, -2, 1.0)
    with pytest.raises(sf.ConvergenceError):
        sf._series(0.5, 1.5, np.array([30.0 + 0j]), max_terms=5)


def test_hyp1f1_kummer_consistency():
    # both sides summed directly where the series converges comfortably
    z = np.array([-0.5 + 0.3j, -2.0 - 1.0j, -4.0 + 2.0j])
    a, b = 0.35 + 0.1j, 1.8
    direct = sf._series(a, b, z, 10_000)[0]
    kummer = np.exp(z) * sf._series(b - a, b, -z, 10_000)[0]
    assert np.max(np.abs(direct - kummer) / np.abs(direct)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-1.5, 1.5), st.floats(0.6, 3.0))
def test_hyp1f1_contiguous_relation(x, y, a, b):
    # (b - a) M(a-1) + (2a - b + z) M(a) - a M(a+1) = 0
    z = complex(x, y)
    m0, mm, mp = hyp1f1(a, b, z), hyp1f1(a - 1, b, z), hyp1f1(a + 1, b, z)
    resid = (b - a) * mm + (2 * a - b + z) * m0 - a * mp
    scale = abs(b - a) * abs(mm) + abs(2 * a - b + z) * abs(m0) + abs(a) * abs(mp)
    assert abs(resid) <= 1e-10 * scale + 1e-14


def _taylor_exp(m, terms=30):
    out = np.eye(m.shape[0], dtype=complex)
    term = out.copy()
    for k in range(1, terms):
        term = term @ m / k
        out = out + term
    return out


def test_mat_exp_examples():
    assert np.array_equal(mat_exp(np.zeros((2, 2))), np.eye(2))
    assert np.allclose(mat_exp(np.diag([1.0, -2.0])), np.diag(np.exp([1.0, -2.0])), rtol=1e-14)
    rng = np.random.default_rng(11)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m *= 2 / np.linalg.norm(m, 2)
    assert np.max(np.abs(mat_exp(m) - _taylor_exp(m))) < 1e-10
    assert np.max(np.abs(mat_exp(m) @ mat_exp(-m) - np.eye(4))) < 1e-10


def test_mat_exp_block_diagonal():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(2, 2))
    m = np.zeros((4, 4), dtype=complex)
    m[:2, :2], m[2:, 2:] = a, b
    e = mat_exp(m)
    assert np.allclose(e[:2, :2], mat_exp(a), atol=1e-13)
    assert np.allclose(e[2:, 2:], mat_exp(b), atol=1e-13)
    assert np.all(e[:2, 2:] == 0) and np.all(e[2:, :2] == 0)


def test_mat_log_examples():
    assert np.allclose(mat_log_principal(np.eye(2)), 0, atol=1e-15)
    assert np.allclose(mat_log_principal(np.diag([np.e, np.e**2])), np.diag([1.0, 2.0]),
                       atol=1e-14)
    rng = np.random.default_rng(2)
    for _ in range(5):
        h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        a = 0.5 * (h + h.conj().T)
        a *= 1 / np.linalg.norm(a, 2)
        assert np.max(np.abs(mat_log_principal(mat_exp(a)) - a)) < 1e-9


def test_mat_log_round_trip_defective():
    m = np.array([[2.0, 1.0], [0.0, 2.0]], dtype=complex)
    assert np.max(np.abs(mat_exp(mat_log_principal(m)) - m)) < 1e-9


def test_mat_log_branch_cut():
    with pytest.raises(BranchCutError):
        mat_log_principal(np.diag([-1.0, 2.0]))
