import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mnlck import hopf
from mnlck.acceptance import HOPF_CONFIGS, hopf_config
from mnlck.hopf import (
    DeformationError, HopfData, QuadraticPotential, SingularPointError, complex_structure,
    conformal_kahler_matrices, lck_form, lck_matrices, potential_derivatives, to_real,
)

E2 = math.e ** 2


def fd_hessian(fun, x, h=1e-4):
    m = len(x)
    out = np.zeros((m, m))
    for a in range(m):
        for b in range(m):
            ea, eb = np.eye(m)[a] * h, np.eye(m)[b] * h
            out[a, b] = (fun(x + ea + eb) - fun(x + ea - eb) - fun(x - ea + eb) + fun(x - ea - eb)) / (4 * h * h)
    return out


def test_beta_two_gives_squared_norm():
    H = HopfData((math.exp(-1),), E2)
    assert H.beta == pytest.approx([2.0], abs=1e-14)
    for z in (1.0, 2 - 1j, 0.3j):
        assert hopf.potential(H, [z]) == pytest.approx(abs(z) ** 2, rel=1e-13)


def test_single_coordinate_on_hyperplane():
    H = HopfData.from_exponents([2.0, 3.0], E2)
    assert hopf.potential(H, [0, 2.0]) == pytest.approx(8.0)
    # the zero coordinate has exponent 2: still positive
    assert hopf.lck_form(H, [0, 1.0]).min_eigenvalue > 0
    # exponent 3 on the zero coordinate: the form degenerates along that plane
    assert hopf.lck_form(H, [1.0, 0]).min_eigenvalue == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(SingularPointError):
        lck_form(HopfData.from_exponents([2.0, 1.5], E2), [1.0, 0])
    with pytest.raises(SingularPointError):
        hopf.potential(H, [0, 0])


@pytest.mark.parametrize("name", sorted(HOPF_CONFIGS))
def test_automorphy(name):
    H = hopf_config(name)
    z = hopf.sample_annulus(H.n, 500, np.random.default_rng(0))
    assert hopf.automorphy_errors(H, z).max() <= 1e-12
    for zz in z[:5]:
        assert hopf.potential(H, H.act(zz)) == pytest.approx(hopf.potential(H, zz) / H.C, rel=1e-12)


def test_lee_form_example_and_invariance():
    H = HopfData.from_exponents([2.0, 3.0], E2)
    # phi = |z1|^2 + |z2|^3 at z = (1, 1): d phi = (2, 0, 3, 0)
    assert np.allclose(hopf.lee_form(H, [1, 1]), np.array([2, 0, 3, 0]) / 2.0)
    z = np.array([0.4 + 1.2j, -2.0 + 0.1j])
    # theta is A-invariant: theta(Az) applied to A v equals theta(z) v
    a = np.asarray(H.alpha)
    Areal = np.zeros((4, 4))
    for j in range(2):
        Areal[2 * j:2 * j + 2, 2 * j:2 * j + 2] = [[a[j].real, -a[j].imag], [a[j].imag, a[j].real]]
    assert np.allclose(hopf.lee_form(H, H.act(z)) @ Areal, hopf.lee_form(H, z), atol=1e-12)


def test_lee_form_fd_is_second_order():
    H = hopf_config("n2_mixed_rotating")
    z = np.array([0.8 - 0.3j, 0.5 + 1.1j])
    err = hopf.lee_form_fd_error(H, z, 1e-3)
    assert err <= 1e-5
    assert 3.5 <= hopf.richardson_ratio(lambda h: hopf.lee_form_fd_error(H, z, h), 1e-2) <= 4.5


def test_lee_field():
    H = HopfData.from_exponents([2.0, 2.0], E2)
    z = np.array([1 + 2j, -0.5j])
    # equal moduli: a multiple of the Euler field
    assert np.allclose(hopf.lee_field(H, z), z * 1.0)
    H2 = HopfData.from_exponents([2.0, 4.0], E2)
    assert np.allclose(hopf.lee_field(H2, [1, 0]), [1.0, 0])
    assert hopf.lee_field_delbar_residual(H2, z) <= 1e-8


def test_n1_form_and_metric():
    H = HopfData.from_exponents([2.0], E2)
    for z in (1.0, 0.5 + 0.5j, -3j):
        P = lck_form(H, [z])
        r2 = abs(z) ** 2
        assert np.allclose(P.omega, np.array([[0, -4], [4, 0]]) / r2, atol=1e-13)
        assert np.allclose(P.metric, 4 * np.eye(2) / r2, atol=1e-13)


def test_positivity_example():
    assert lck_form(HopfData.from_exponents([2.0, 3.0], E2), [1, 1]).min_eigenvalue > 0


@pytest.mark.parametrize("name", sorted(HOPF_CONFIGS))
def test_two_routes_and_fd_hessian_agree(name):
    H = hopf_config(name)
    rng = np.random.default_rng(7)
    z = hopf.sample_annulus(H.n, 30, rng, 0.5, 3)
    x = to_real(z)
    a, b = lck_matrices(H.beta, x), conformal_kahler_matrices(H.beta, x)
    assert np.max(np.abs(a - b)) / np.max(np.abs(b)) <= 1e-8
    J = complex_structure(H.n)
    for xx, om in zip(x[:5], a[:5]):
        hess = fd_hessian(lambda y: float(potential_derivatives(H.beta, y)[0][0]), xx)
        fd = (hess @ J - (hess @ J).T) / potential_derivatives(H.beta, xx)[0][0]
        assert np.max(np.abs(fd - om)) <= 1e-5 * np.max(np.abs(om))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_form_is_real_type_11_and_positive(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    betas = rng.uniform(2.0, 5.0, size=n)
    H = HopfData.from_exponents(betas, float(rng.uniform(1.5, 10)), rng.uniform(-3, 3, size=n))
    P = lck_form(H, hopf.sample_annulus(n, 1, rng)[0])
    scale = np.max(np.abs(P.omega))
    assert P.antisymmetry_residual <= 1e-12 * scale
    assert P.invariance_residual <= 1e-12 * scale
    assert P.metric_symmetry_residual <= 1e-12 * scale
    assert P.min_eigenvalue > 0


@pytest.mark.parametrize("name", ["n2_beta2_3", "n2_mixed_rotating", "n3_mixed"])
def test_structure_equation_second_order(name):
    H = hopf_config(name)
    rng = np.random.default_rng(3)
    for z in hopf.sample_annulus(H.n, 5, rng):
        r = hopf.structure_equation_residual(H, z, 1e-3)
        assert r <= 1e-5
        assert 3.5 <= hopf.richardson_ratio(lambda h: hopf.structure_equation_residual(H, z, h), 1e-3) <= 4.5


@pytest.mark.parametrize("betas", [[2.0, 2.0], [4.0, 4.0], [2.0, 4.0]])
def test_conformal_kahler_form_is_closed(betas):
    H = HopfData.from_exponents(betas, E2)
    z = np.array([0.7 + 0.2j, -0.4 + 1.0j])
    assert hopf.structure_equation_residual(H, z, 1e-3, closed_form=True) <= 1e-10


def test_structure_equation_vacuous_for_n1():
    assert hopf.structure_equation_residual(HopfData.from_exponents([3.0], 4.0), [1.0], 1e-3) == 0.0


def test_potential_identity():
    rng = np.random.default_rng(8)
    H = hopf_config("n2_beta2_3")
    for _ in range(5):
        f = QuadraticPotential.random(2, rng)
        z = hopf.sample_annulus(2, 1, rng, 3.0, 6.0)[0]
        assert hopf.potential_identity_residual(H, f, z, 1e-3) <= 1e-6
        assert hopf.potential_identity_residual(None, f, z, 1e-3) <= 1e-8


def test_identity_special_cases():
    H = hopf_config("n2_beta2_3")
    x = to_real(np.array([1.0 + 1j, 2.0]))
    theta, hlog = hopf.log_potential_derivatives(H.beta, x[None])
    # f = 1 leaves theta ^ I theta + d^c theta; omega = theta ^ I theta - d^c theta
    one = QuadraticPotential.constant(1.0, 2)
    theta_i_theta = hopf.wedge(theta[0], theta[0] @ complex_structure(2))
    omega = lck_matrices(H.beta, x[None])[0]
    assert np.allclose(hopf.twisted_ddc_expansion(one, theta[0], hlog[0], x), 2 * theta_i_theta - omega, atol=1e-12)
    # theta = 0: only dd^c f survives
    f = QuadraticPotential.random(2, np.random.default_rng(1))
    flat = hopf.twisted_ddc_expansion(f, np.zeros(4), np.zeros((4, 4)), x)
    assert np.allclose(flat, hopf.ddc_matrix(f.Q, complex_structure(2)))


def test_rational_deformation_examples():
    d = hopf.rational_lee_deformation([1.0, math.sqrt(2)], 1e-2)
    assert d.ratios == (Fraction(1), Fraction(99, 70))
    assert d.error <= 1e-4
    assert hopf.rational_lee_deformation([math.log(2)], 1e-12).ratios == (Fraction(1),)
    d = hopf.rational_lee_deformation([0.0, 2.0, 3.0], 1e-12)
    assert d.ratios == (Fraction(0), Fraction(1), Fraction(3, 2)) and d.error == 0
    with pytest.raises(DeformationError):
        hopf.rational_lee_deformation([0.0, 0.0], 1e-2)
    with pytest.raises(DeformationError):
        hopf.rational_lee_deformation([1.0, math.pi], 1e-9, 10)
    with pytest.raises(DeformationError):
        hopf.rational_lee_deformation([1.0], 0)


def test_convergents_of_sqrt2():
    cs = [c for c, _ in zip(hopf.convergents(math.sqrt(2)), range(6))]
    assert cs == [Fraction(1), Fraction(3, 2), Fraction(7, 5), Fraction(17, 12), Fraction(41, 29), Fraction(99, 70)]
    assert hopf.last_convergent(math.sqrt(2), 100) == Fraction(99, 70)


def test_positivity_threshold():
    rng = np.random.default_rng(4)
    z = hopf.sample_annulus(2, 200, rng)
    t = hopf.positivity_threshold([2.0, 3.0], z, rng)
    assert 0 < t <= 6.0
    dirs = hopf._perturbations(2, rng, 16)
    assert hopf.deformed_min_eigenvalue([2.0, 3.0], t / 2, dirs, z) > 0
    assert hopf.deformed_min_eigenvalue([2.0, 3.0], 2.5, dirs, z) == float("-inf")


def test_hopf_data_validation():
    with pytest.raises(ValueError):
        HopfData((), 2.0)
    with pytest.raises(ValueError):
        HopfData((1.2,), 2.0)
    with pytest.raises(ValueError):
        HopfData((0.5,), 1.0)
    assert HopfData((0.5, 0.3), 2.0).beta[1] == pytest.approx(math.log(2) / math.log(1 / 0.3))
    H = HopfData((0.5, 0.5j), 4.0)
    assert np.allclose(H.beta, [2.0, 2.0])
    assert H.as_dict()["C"] == 4.0
    with pytest.raises(ValueError):
        hopf.potential(H, [1.0])
