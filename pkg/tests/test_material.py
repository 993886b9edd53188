import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antiplane.errors import DomainError, PreconditionError
from antiplane.material import (
    BodyForce,
    MaterialModel,
    check_structural_conditions,
    eval_body_force,
    eval_strain,
    leading_amplitude,
)

kappas = st.floats(-8.0, 8.0, allow_nan=False)
lams = st.floats(0.0, 10.0, allow_nan=False)
qs = st.floats(0.0, 20.0, allow_nan=False)
families = st.sampled_from(list(BodyForce))


def test_strain_values(model):
    # W = q + q^2 at q = 2: (6, 5, 2, 0)
    assert eval_strain(model, 2.0) == (6.0, 5.0, 2.0, 0.0)


def test_strain_rejects_negative_q(model):
    with pytest.raises(DomainError):
        eval_strain(model, -1e-3)


def test_body_force_values(model, tanh_model):
    assert eval_body_force(model, 0.5, 1.0) == (-1.0, -2.0, -0.5, -0.25)
    b, bk, bl, B = eval_body_force(tanh_model, 0.5, 1.0)
    assert b == pytest.approx(-2 * math.tanh(0.5), rel=1e-15)
    assert bk == pytest.approx(-2 / math.cosh(0.5) ** 2, rel=1e-15)
    assert B == pytest.approx(-2 * math.log(math.cosh(0.5)), rel=1e-14)


def test_body_force_rejects_negative_lambda(model):
    with pytest.raises(DomainError):
        eval_body_force(model, 0.1, -0.5)


def test_coefficients_validated():
    with pytest.raises(PreconditionError):
        MaterialModel((2.0, 1.0))
    with pytest.raises(PreconditionError):
        MaterialModel((1.0, 1.0, 0.0, 0.0, 1.0))
    assert MaterialModel.quadratic(0.5, "tanh", (0.1,)).w_coeffs == (1.0, 0.5, 0.1)


def test_default_models_pass_all_conditions(model, tanh_model):
    assert check_structural_conditions(model).all_passed
    assert check_structural_conditions(tanh_model).all_passed


def test_w1_zero_fails_enhanced_ellipticity():
    report = check_structural_conditions(MaterialModel.quadratic(0.0))
    assert "enhanced_ellipticity" in report.failures
    assert "amplitude_constant" in report.failures


def test_softening_cubic_loses_ellipticity():
    # W' + 2qW'' = 1 - 6q^2 turns negative at q = 1/sqrt(6)
    report = check_structural_conditions(MaterialModel((1.0, 0.0, -1.0)))
    assert "ellipticity" in report.failures


def test_report_serializes(model):
    d = check_structural_conditions(model).to_dict()
    assert d["all_passed"] and set(d["conditions"]) >= {"b_odd", "ellipticity"}


def test_leading_amplitude(model, tanh_model):
    assert leading_amplitude(model) == pytest.approx(2 / math.sqrt(6), rel=1e-15)
    assert leading_amplitude(tanh_model) == pytest.approx(2 / math.sqrt(3 * (1 / 3 + 2)), rel=1e-15)
    with pytest.raises(PreconditionError):
        leading_amplitude(MaterialModel.quadratic(-0.5))


@given(k=kappas, lam=lams, fam=families)
def test_b_is_odd(k, lam, fam):
    m = MaterialModel(family=fam)
    assert m.b(-k, lam) == -m.b(k, lam)


@given(k=st.floats(-5.0, 5.0), lam=lams, fam=families)
@settings(max_examples=50)
def test_primitive_derivative_matches_b(k, lam, fam):
    m = MaterialModel(family=fam)
    h = 1e-5
    fd = (m.B(k + h, lam) - m.B(k - h, lam)) / (2 * h)
    assert fd == pytest.approx(m.b(k, lam), rel=1e-7, abs=1e-8)
    fd_k = (m.b(k + h, lam) - m.b(k - h, lam)) / (2 * h)
    assert fd_k == pytest.approx(m.b_kappa(k, lam), rel=1e-7, abs=1e-8)


@given(q=st.floats(1e-3, 20.0), c=st.lists(st.floats(0.0, 2.0), min_size=1, max_size=3))
@settings(max_examples=50)
def test_kinetic_derivative_is_half_ellipticity(q, c):
    # d/dq (W' q - W/2) = (W' + 2 q W'') / 2
    m = MaterialModel((1.0, *c))
    h = 1e-4 * q
    fd = (m.kinetic(q + h) - m.kinetic(q - h)) / (2 * h)
    assert fd == pytest.approx(0.5 * m.ellipticity(q), rel=1e-6)


@given(b_over=st.floats(1e-9, 3.0), lam=lams)
def test_b_over_kappa_continuous(b_over, lam):
    m = MaterialModel(family=BodyForce.TANH)
    assert m.b_over_kappa(b_over, lam) == pytest.approx(m.b(b_over, lam) / b_over, rel=1e-12)


def test_b_over_kappa_limit():
    m = MaterialModel(family=BodyForce.TANH)
    assert m.b_over_kappa(0.0, 1.0) == -2.0


def test_vectorized_shapes(model):
    q = np.linspace(0, 1, 7).reshape(7, 1) * np.ones((1, 3))
    assert model.W(q).shape == (7, 3)
    assert model.b_kappa(q, 0.5).shape == (7, 3)
