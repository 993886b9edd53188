import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antiplane import conjugate_flow as cf
from antiplane.errors import DomainError, NoSolutionError, StepCountError
from antiplane.material import MaterialModel, leading_amplitude

# initial slope and energy level of U+ from the dense shooting oracle
ORACLE = {
    ("linear", 1.0): (0.775039363227412, 0.8415785393934384),
    ("linear", 4.0): (1.5259524925999344, 9.297350499341803),
    ("tanh", 1.0): (0.6818272956976668, 0.5566261525565254),
}


@pytest.mark.parametrize("lam", [0.0, 1.0, 3.0])
def test_period_small_orbit_limit(model, lam):
    assert cf.period_map(model, 1e-8, lam) == pytest.approx(math.pi / math.sqrt(1 + lam), rel=1e-7)
    assert cf.period_limit(model, lam) == pytest.approx(math.pi / math.sqrt(1 + lam), rel=1e-15)


def test_period_map_increasing(model, tanh_model):
    c = np.logspace(-6, 1, 20)
    for m in (model, tanh_model):
        assert np.all(np.diff([cf.period_map(m, ci, 1.0) for ci in c]) > 0)


def test_radius_lies_on_level(model):
    theta = np.linspace(0, math.pi / 2, 9)
    r = cf.radius_on_level(model, theta, 0.7, 1.0)
    U, V = r * np.cos(theta), r * np.sin(theta)
    assert np.allclose(cf.hamiltonian(model, U, V, 1.0), 0.7, rtol=1e-12)


def test_radius_rejects_nonpositive_level(model):
    with pytest.raises(DomainError):
        cf.radius_on_level(model, 0.3, 0.0, 1.0)


@pytest.mark.parametrize("key", sorted(ORACLE))
def test_c1_matches_shooting_oracle(key):
    fam, lam = key
    m = MaterialModel(family=fam)
    V0, c1 = ORACLE[key]
    assert cf.solve_c1(m, lam) == pytest.approx(c1, rel=1e-9)
    assert cf.u_plus(m, lam).V[0] == pytest.approx(V0, rel=1e-9)


def test_c1_closes_the_period(model):
    c1 = cf.solve_c1(model, 0.5)
    assert abs(cf.period_map(model, c1, 0.5) - math.pi) <= 1e-10


def test_no_state_without_load(model):
    for lam in (0.0, -1.0):
        with pytest.raises(NoSolutionError):
            cf.solve_c1(model, lam)


def test_profile_invariants(model):
    p = cf.u_plus(model, 1.0)
    assert np.all(p.U[1:-1] > 0)
    assert abs(p.U[-1]) <= 1e-8
    assert np.max(np.abs(cf.hamiltonian(model, p.U, p.V, 1.0) - p.c)) <= 1e-10
    # even in y: U(y) = U(-y)
    assert np.allclose(p.U, p.U[::-1], atol=1e-9)
    assert cf.ode_defect(model, p) <= 1e-8


def test_too_coarse_integration_raises(model):
    with pytest.raises(StepCountError):
        cf.integrate_profile(model, cf.solve_c1(model, 10.0), 10.0, n_steps=64)


def test_u_minus_is_reflection(model):
    p, m = cf.u_plus(model, 2.0), cf.u_minus(model, 2.0)
    assert np.array_equal(m.U, -p.U)
    assert cf.check_conjugate(model, p, m, 2.0)


def test_zero_state_not_conjugate(model):
    p = cf.u_plus(model, 1.0)
    zero = cf.integrate_profile(model, 0.0, 1.0, p.n_steps)
    assert cf.flow_force_1d(model, zero) == 0.0
    assert not cf.check_conjugate(model, p, zero, 1.0)


def test_flow_force_decreasing_and_derivative(model):
    lams = np.linspace(0.1, 4.0, 6)
    S = [cf.flow_force_1d(model, cf.u_plus(model, lam, 2048)) for lam in lams]
    assert np.all(np.diff(S) < 0) and S[0] < 0
    lam, d = 1.3, 1e-3
    p = cf.u_plus(model, lam, 2048)
    fd = (cf.flow_force_1d(model, cf.u_plus(model, lam + d, 2048)) - cf.flow_force_1d(model, cf.u_plus(model, lam - d, 2048))) / (2 * d)
    from scipy.integrate import simpson

    assert fd == pytest.approx(simpson(model.B_lambda(p.U, lam), x=p.y), rel=1e-5)


def test_onset_amplitude(model):
    # U+(0) = a1 eps + O(eps^3)
    eps = np.array([0.1, 0.05])
    ratio = np.array([cf.u_plus(model, e * e).center_value / e for e in eps])
    a1 = leading_amplitude(model)
    err = np.abs(ratio - a1)
    assert err[1] < err[0] / 3.5


@given(lam=st.floats(0.05, 5.0), w1=st.floats(0.2, 4.0))
@settings(max_examples=15, deadline=None)
def test_linear_family_amplitude_scaling(lam, w1):
    # for b linear in kappa, U -> U / sqrt(w1) maps the w1 = 1 state to the w1 state
    base = cf.u_plus(MaterialModel.quadratic(1.0), lam)
    scaled = cf.u_plus(MaterialModel.quadratic(w1), lam, n_steps=base.n_steps)
    assert scaled.center_value == pytest.approx(base.center_value / math.sqrt(w1), rel=1e-8)


@given(lam=st.floats(0.05, 5.0))
@settings(max_examples=15, deadline=None)
def test_center_value_increases_with_load(lam):
    m = MaterialModel()
    assert cf.u_plus(m, lam * 1.1).center_value > cf.u_plus(m, lam).center_value


def test_conjugate_rows(model, tmp_path):
    rows = cf.conjugate_rows(model, [0.25, 1.0, 4.0])
    assert [r["lambda"] for r in rows] == [0.25, 1.0, 4.0]
    assert rows[0]["S_plus"] > rows[1]["S_plus"] > rows[2]["S_plus"]
    path = tmp_path / "c.csv"
    cf.write_conjugate_csv(path, rows)
    assert path.read_text().splitlines()[0] == "lambda,c1,S_plus,U_plus_at_0,Vmax,P_limit"
