import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antiplane import conjugate_flow as cf
from antiplane import spectrum
from antiplane.errors import DomainError
from antiplane.material import MaterialModel


def zero_profile(lam, n_steps=1024):
    y = np.linspace(-cf.HALF_PI, cf.HALF_PI, n_steps + 1)
    return cf.TransversalProfile(lam, 0.0, y, np.zeros_like(y), np.zeros_like(y))


@pytest.mark.parametrize("lam", [0.0, 0.5, 2.0])
def test_rest_state_eigenvalue_is_exact_discrete_value(model, lam):
    # psi'' + (1 + lam) psi on n cells: top eigenvalue (1 + lam) - (4/h^2) sin^2(h/2)
    n = 256
    h = math.pi / n
    op = spectrum.assemble_operator(model, zero_profile(lam), lam, n)
    res = spectrum.principal_eigenvalue(op)
    assert res.sigma0 == pytest.approx(1 + lam - 4 / h**2 * math.sin(h / 2) ** 2, abs=1e-11)
    assert np.allclose(res.phi, np.cos(res.y), atol=1e-10)


def test_matrix_is_symmetric(model):
    op = spectrum.assemble_operator(model, cf.u_plus(model, 1.0, 1024), 1.0, 64)
    A = op.matrix()
    assert np.array_equal(A, A.T)


def test_too_few_cells(model):
    with pytest.raises(DomainError):
        spectrum.assemble_operator(model, zero_profile(0.0), 0.0, 16)


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_rest_state_kernel_shooting_closed_form(model, lam):
    k = math.sqrt(1 + lam)
    val = spectrum.kernel_test_shooting(model, zero_profile(lam), lam)
    assert val == pytest.approx(math.sin(k * math.pi) / k, abs=1e-10)


def test_trivial_kernel_at_onset(model):
    assert abs(spectrum.kernel_test_shooting(model, zero_profile(0.0), 0.0)) <= 1e-8


@pytest.mark.parametrize("lam", [0.25, 1.0, 4.0])
def test_shooting_sign_opposes_sigma0(model, tanh_model, lam):
    # Sturm comparison: sigma0 < 0 leaves the shooting solution without zeros
    for m in (model, tanh_model):
        p = cf.u_plus(m, lam, 1024)
        sig = spectrum.principal_eigenvalue(spectrum.assemble_operator(m, p, lam, 512)).sigma0
        phi_end = spectrum.kernel_test_shooting(m, p)
        assert sig < 0 < phi_end


@given(lam=st.floats(0.05, 5.0))
@settings(max_examples=10, deadline=None)
def test_positive_state_is_spectrally_stable(lam):
    m = MaterialModel()
    p = cf.u_plus(m, lam, 1024)
    res = spectrum.principal_eigenvalue(spectrum.assemble_operator(m, p, lam, 512))
    assert res.sigma0 < 0
    assert np.all(res.phi[1:-1] > 0)


def test_sigma0_onset_slope(model, tanh_model):
    # reduced amplitude equation: sigma0 = -2 lam + O(lam^2)
    for m in (model, tanh_model):
        table = spectrum.sigma0_curve(m, [0.2, 0.1, 0.05])
        assert spectrum.richardson_ratio(table) == pytest.approx(-2.0, abs=2e-3)


def test_sigma0_independent_of_w1_for_linear_force():
    # U -> U/sqrt(w1) leaves W' + 2 q W'' along U+ unchanged
    a = spectrum.sigma0_curve(MaterialModel.quadratic(1.0), [0.5], n=256)
    b = spectrum.sigma0_curve(MaterialModel.quadratic(0.3), [0.5], n=256)
    assert a[0, 1] == pytest.approx(b[0, 1], rel=1e-9)


def test_richardson_needs_halving():
    with pytest.raises(DomainError):
        spectrum.richardson_ratio(np.array([[0.2, -0.08], [0.15, -0.045]]))


def test_spectrum_csv(tmp_path):
    path = tmp_path / "s.csv"
    spectrum.write_spectrum_csv(path, [{"epsilon": 0.1, "lambda": 0.01, "sigma0": -0.02, "phi_dot_end": 0.1}])
    lines = path.read_text().splitlines()
    assert lines[0] == "epsilon,lambda,sigma0,phi_dot_end" and len(lines) == 2
