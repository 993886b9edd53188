import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antiplane import conjugate_flow as cf
from antiplane import front_solver as fs
from antiplane.errors import DomainError, NonConvergenceError
from antiplane.material import MaterialModel, leading_amplitude

SMALL = fs.Grid2D(L=6.0, n_x=25, n_y=17)


def test_grid_geometry():
    g = fs.Grid2D.for_lambda(0.01)
    assert g.L == 80.0 and g.hx == pytest.approx(0.5) and g.hy == pytest.approx(math.pi / 64)
    assert g.x[g.n_x // 2] == 0.0 and g.y[g.n_y // 2] == 0.0
    assert g.y[0] == -math.pi / 2 and g.y[-1] == math.pi / 2
    assert fs.Grid2D.for_lambda(4.0).L == 12.0
    with pytest.raises(DomainError):
        fs.Grid2D(1.0, 10, 9)


@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_zero_field_has_zero_residual(model, lam):
    front = fs.FrontState(SMALL, np.zeros((25, 17)), lam)
    assert np.max(np.abs(fs.residual(model, front))) == 0.0


def test_linearization_at_rest_is_helmholtz(model):
    rng = np.random.default_rng(1)
    v = rng.standard_normal((25, 17))
    v[0] = v[-1] = 0
    v[:, 0] = v[:, -1] = 0
    front = fs.FrontState(SMALL, np.zeros((25, 17)), 0.0)
    out = fs.linearized_apply(model, front, v)
    hx, hy = SMALL.hx, SMALL.hy
    lap = (v[2:, 1:-1] - 2 * v[1:-1, 1:-1] + v[:-2, 1:-1]) / hx**2 + (v[1:-1, 2:] - 2 * v[1:-1, 1:-1] + v[1:-1, :-2]) / hy**2
    assert np.allclose(out[1:-1, 1:-1], lap + v[1:-1, 1:-1], atol=1e-12)


@given(seed=st.integers(0, 2**16), lam=st.floats(0.1, 3.0))
@settings(max_examples=10, deadline=None)
def test_linearization_matches_directional_derivative(seed, lam):
    m = MaterialModel()
    rng = np.random.default_rng(seed)
    u = 0.3 * rng.standard_normal((25, 17))
    v = rng.standard_normal((25, 17))
    for a in (u, v):
        a[0] = a[-1] = 0
        a[:, 0] = a[:, -1] = 0
    front = fs.FrontState(SMALL, u, lam, far_field=np.zeros(17))
    d = 1e-6
    fd = (fs.residual(m, fs.FrontState(SMALL, u + d * v, lam, far_field=np.zeros(17))) - fs.residual(m, front)) / d
    jv = fs.linearized_apply(m, front, v)
    assert np.max(np.abs(fd - jv)) <= 1e-5 * max(1.0, np.max(np.abs(jv)))


def test_seed_shape(model):
    seed = fs.asymptotic_seed(model, 0.2)
    g = seed.grid
    assert seed.lam == pytest.approx(0.04)
    assert np.all(seed.u[g.n_x // 2] == 0)
    a1 = leading_amplitude(model)
    # tanh(0.2 L / sqrt 2) differs from 1 by ~2e-5 at L = 40
    assert np.allclose(seed.u[-1], a1 * 0.2 * np.cos(g.y), atol=1e-5)
    with pytest.raises(DomainError):
        fs.asymptotic_seed(model, 0.0)


def test_seed_residual_shrinks(model):
    # residual of the seed is O(eps^3): the ratio over eps^2 must fall under halving
    r = []
    for eps in (0.2, 0.1):
        seed = fs.asymptotic_seed(model, eps, n_y=257)
        r.append(np.max(np.abs(fs.residual(model, seed)[1:-1, 1:-1])) / eps**2)
    assert r[1] < r[0]


def test_trivial_state_needs_no_iterations(model):
    g = fs.Grid2D(6.0, 25, 17)
    out = fs.newton_solve(model, fs.FrontState(g, np.zeros((25, 17)), 0.0), max_iter=0)
    assert np.all(out.u == 0)


def test_iteration_budget(model):
    with pytest.raises(NonConvergenceError):
        fs.newton_solve(model, fs.asymptotic_seed(model, 0.3), max_iter=1)


def test_converged_front_symmetries(model, front_01):
    u = front_01.u
    assert np.max(np.abs(fs.residual(model, front_01))) <= 1e-10
    assert np.max(np.abs(u + u[::-1])) <= 1e-10
    assert np.max(np.abs(u - u[:, ::-1])) <= 1e-10
    assert np.all(u[:, 0] == 0) and np.all(u[:, -1] == 0)


def test_quarter_and_full_residuals_agree(model, front_01):
    g = front_01.grid
    prob = fs.QuarterProblem(model, g, front_01.lam, far=front_01.far_field)
    rq = prob.residual(front_01.quarter()).reshape(prob.shape)
    full = fs.residual(model, front_01)[g.n_x // 2 + 1 : -1, g.n_y // 2 : -1]
    assert np.max(np.abs(rq - full)) <= 1e-13


def test_far_field_data(model, front_01):
    g = front_01.grid
    exact = fs.far_field_values(model, front_01.lam, g, kind="exact")
    U = cf.u_plus(model, front_01.lam, 4096)
    assert np.allclose(exact, U.U[:: 4096 // (g.n_y - 1)], atol=1e-12)
    assert np.array_equal(front_01.u[-1], fs.far_field_values(model, front_01.lam, g))


def test_discrete_far_field_converges_second_order(model):
    err = []
    for n_y in (33, 65, 129):
        g = fs.Grid2D(12.0, 9, n_y)
        err.append(np.max(np.abs(fs.far_field_values(model, 1.0, g) - fs.far_field_values(model, 1.0, g, "exact"))))
    assert 3.5 <= err[0] / err[1] <= 4.5 and 3.5 <= err[1] / err[2] <= 4.5


def test_far_field_lambda_derivative(model):
    g = fs.Grid2D(12.0, 9, 33)
    d = 1e-5
    fd = (fs.far_field_values(model, 1.0 + d, g) - fs.far_field_values(model, 1.0 - d, g)) / (2 * d)
    assert np.allclose(fs.far_field_lambda_derivative(model, 1.0, g), fd, atol=1e-7)


def test_translation_mode_nearly_in_kernel(model, front_01):
    g = front_01.grid
    ux = np.gradient(front_01.u, g.hx, axis=0)
    image = fs.linearized_apply(model, front_01, ux)
    inner = slice(g.n_x // 4, 3 * g.n_x // 4)
    assert np.max(np.abs(image[inner, 1:-1])) <= 1e-2 * np.max(np.abs(ux))


def test_flow_force(model, front_01):
    zero = fs.FrontState(SMALL, np.zeros((25, 17)), 1.0)
    assert np.all(fs.flow_force_columns(model, zero) == 0)
    S = fs.flow_force_columns(model, front_01)
    g = front_01.grid
    assert np.max(np.abs(S - S[g.n_x // 2])) <= 10 * max(g.hx, g.hy) ** 2
    with pytest.raises(DomainError):
        fs.flow_force_2d(model, front_01, g.n_x)


def test_end_columns_carry_conjugate_flow_force(model):
    front = fs.newton_solve(model, fs.asymptotic_seed(model, 0.5))
    S_plus = cf.flow_force_1d(model, cf.u_plus(model, front.lam))
    assert fs.flow_force_2d(model, front, 0) == pytest.approx(S_plus, rel=2e-2)
    assert fs.flow_force_2d(model, front, front.grid.n_x - 1) == pytest.approx(S_plus, rel=2e-2)


def test_nodal_pattern(front_01):
    rep = front_01 and fs.nodal_check(front_01)
    assert rep.ok, rep.failures
    flipped = fs.FrontState(front_01.grid, front_01.u[::-1].copy(), front_01.lam)
    assert not fs.nodal_check(flipped).ok
    assert fs.nodal_check(flipped, orientation=-1).ok
    zero = fs.FrontState(SMALL, np.zeros((25, 17)), 1.0)
    assert "u_x_positive" in fs.nodal_check(zero).failures


def test_max_principle(model, front_01):
    rep = fs.max_principle_check(model, front_01)
    assert rep.ok and rep.coercivity_margin >= 0
    assert abs(rep.argmax_x) == front_01.grid.L
    zero = fs.FrontState(SMALL, np.zeros((25, 17)), 1.0)
    ux = np.zeros((25, 17))
    assert np.all(fs.max_principle_P(model, zero.u, ux, 1.0) == 0)


def test_blowup_proxy(front_01):
    zero = fs.FrontState(SMALL, np.zeros((25, 17)), 1.0)
    assert fs.blowup_proxy(zero) == 2.0
    assert fs.blowup_proxy(front_01) >= front_01.lam + 1 / front_01.lam
    with pytest.raises(DomainError):
        fs.blowup_proxy(fs.FrontState(SMALL, np.zeros((25, 17)), 0.0))


def test_neumann_far_field(model):
    seed = fs.asymptotic_seed(model, 0.5)
    front = fs.newton_solve(model, fs.FrontState(seed.grid, seed.u, seed.lam, bc="neumann"))
    assert fs.nodal_check(front).ok
    exact = fs.far_field_values(model, front.lam, front.grid)
    # Neumann truncation leaves an exponentially small gap at x = L
    assert np.max(np.abs(front.u[-1] - exact)) <= 1e-3 * np.max(exact)


def test_write_field(tmp_path):
    zero = fs.FrontState(SMALL, np.zeros((25, 17)), 1.0)
    path = tmp_path / "u.csv"
    fs.write_field(path, zero)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,u" and len(lines) == 1 + 25 * 17
