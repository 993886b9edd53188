"""Front solutions of the quasilinear PDE on a truncated strip.

    div(W'(|grad u|^2) grad u) - b(u, lam) = 0   in (-L, L) x (-pi/2, pi/2)
    u = 0 at y = +-pi/2,   u = +-U_far at x = +-L

Discretization is conservative: fluxes ``W'(q) du/dn`` live on cell faces,
with ``q`` built from the one-sided normal difference and the average of
the two adjacent centred tangential differences. This gives a 3x3 stencil.

Newton iterations run on the quarter ``[0, L] x [0, pi/2]``, using
``u = 0`` on ``x = 0`` (oddness) and a reflected ghost row at ``y = 0``
(evenness), and are mirrored back to the full strip afterwards.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, linalg

from . import conjugate_flow as cf
from .errors import DomainError, EllipticityError, NoSolutionError, NonConvergenceError
from .material import MaterialModel, leading_amplitude

__all__ = [
    "Grid2D",
    "FrontState",
    "NodalReport",
    "MaxPrincipleReport",
    "far_field_values",
    "far_field_lambda_derivative",
    "residual",
    "linearized_apply",
    "asymptotic_seed",
    "newton_solve",
    "flow_force_2d",
    "flow_force_columns",
    "nodal_check",
    "max_principle_P",
    "max_principle_check",
    "blowup_proxy",
    "write_field",
]


@dataclass(frozen=True)
class Grid2D:
    """Uniform tensor grid on ``[-L, L] x [-pi/2, pi/2]``.

    Both node counts are odd so that ``x = 0`` and ``y = 0`` are nodes.
    """

    L: float
    n_x: int
    n_y: int

    def __post_init__(self):
        if self.n_x < 5 or self.n_y < 5 or self.n_x % 2 == 0 or self.n_y % 2 == 0:
            raise DomainError("node counts must be odd and at least 5")
        if not self.L > 0:
            raise DomainError("truncation length must be positive")

    @classmethod
    def for_lambda(cls, lam: float, n_y: int = 65, hx: float | None = None, L: float | None = None) -> "Grid2D":
        """Truncation ``L = max(12, 8/sqrt(lam))`` and an x-spacing that
        resolves the interface width ``~ sqrt(2/lam)``."""
        L = max(12.0, 8.0 / math.sqrt(lam)) if L is None else L
        if hx is None:
            hx = min(0.5, 0.25 / math.sqrt(lam))
        half = max(2, math.ceil(L / hx))
        return cls(L=float(L), n_x=2 * half + 1, n_y=n_y)

    @property
    def hx(self) -> float:
        return 2.0 * self.L / (self.n_x - 1)

    @property
    def hy(self) -> float:
        return math.pi / (self.n_y - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.n_x)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(-0.5 * math.pi, 0.5 * math.pi, self.n_y)

    @property
    def quarter_shape(self) -> tuple[int, int]:
        return (self.n_x + 1) // 2, (self.n_y + 1) // 2

    def refined(self) -> "Grid2D":
        return Grid2D(self.L, 2 * self.n_x - 1, 2 * self.n_y - 1)

    def to_dict(self) -> dict:
        return {"L": self.L, "n_x": self.n_x, "n_y": self.n_y, "hx": self.hx, "hy": self.hy}


@dataclass(frozen=True)
class FrontState:
    """Nodal field ``u[i, j] = u(x_i, y_j)`` on a :class:`Grid2D`.

    ``far_field`` is the Dirichlet data on ``x = +L`` (its negative is used
    at ``x = -L``). When it is ``None`` the boundary columns of ``u`` are
    taken as their own data.
    """

    grid: Grid2D
    u: np.ndarray
    lam: float
    bc: str = "dirichlet"
    far_field: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.u.shape != (self.grid.n_x, self.grid.n_y):
            raise DomainError(f"field shape {self.u.shape} does not match grid")
        if self.bc not in ("dirichlet", "neumann"):
            raise DomainError(f"unknown boundary condition {self.bc!r}")

    def quarter(self) -> np.ndarray:
        ix, jy = self.grid.n_x // 2, self.grid.n_y // 2
        return self.u[ix:, jy:]

    @classmethod
    def from_quarter(cls, grid: Grid2D, uq: np.ndarray, lam: float, **kw) -> "FrontState":
        """Mirror a quarter field: odd in x, even in y."""
        top = np.concatenate([uq[:, :0:-1], uq], axis=1)
        full = np.concatenate([-top[:0:-1], top], axis=0)
        full[full.shape[0] // 2] = 0.0
        return cls(grid, full, lam, **kw)


# ---------------------------------------------------------------------------
# far field


@lru_cache(maxsize=256)
def _far_field_cached(model: MaterialModel, lam: float, n_y: int, kind: str) -> np.ndarray:
    if lam <= 0:
        return np.zeros(n_y)
    steps = n_y - 1
    mult = max(1, math.ceil(cf.DEFAULT_STEPS / steps))
    prof = cf.u_plus(model, lam, n_steps=steps * mult)
    U = prof.U[:: prof.n_steps // steps].copy()
    U[0] = U[-1] = 0.0
    if kind == "exact":
        return U
    return _discrete_transversal(model, U, lam)


def _transversal_residual(model, U, lam, h):
    p = np.diff(U) / h
    return np.diff(model.W(p * p, 1) * p) / h - model.b(U[1:-1], lam), p * p


def _transversal_jacobian(model, U, lam, h, q):
    a = model.ellipticity(q) / h**2
    ab = np.zeros((3, U.size - 2))
    ab[0, 1:] = a[1:-1]
    ab[1] = -(a[:-1] + a[1:]) - model.b_kappa(U[1:-1], lam)
    ab[2, :-1] = a[1:-1]
    return ab


def _discrete_transversal(model, U, lam, max_iter=30):
    """Newton on the 1D flux-form scheme, the x-independent restriction of
    the 2D discretization, seeded with the continuous state."""
    h = math.pi / (U.size - 1)
    U = U.copy()
    scale = max(1.0, float(np.max(np.abs(U))))
    for _ in range(max_iter):
        R, q = _transversal_residual(model, U, lam, h)
        dU = linalg.solve_banded((1, 1), _transversal_jacobian(model, U, lam, h, q), R)
        U[1:-1] -= dU
        if np.max(np.abs(dU)) <= 1e-15 * scale:
            break
    R, _ = _transversal_residual(model, U, lam, h)
    if np.max(np.abs(R)) > 1e-9 * scale:
        raise NonConvergenceError("discrete transversal state did not converge")
    return U


def far_field_lambda_derivative(model: MaterialModel, lam: float, grid: Grid2D, far: np.ndarray | None = None) -> np.ndarray:
    """``d U_h / d lam`` of the discrete transversal state (zero endpoints)."""
    far = far_field_values(model, lam, grid) if far is None else far
    h = grid.hy
    _, q = _transversal_residual(model, far, lam, h)
    ab = _transversal_jacobian(model, far, lam, h, q)
    out = np.zeros_like(far)
    out[1:-1] = linalg.solve_banded((1, 1), ab, model.b_lambda(far[1:-1], lam))
    return out


def far_field_values(model: MaterialModel, lam: float, grid: Grid2D, kind: str = "discrete") -> np.ndarray:
    """Far-field data on the grid's y-nodes.

    ``"exact"`` samples ``U+(lam)``; ``"discrete"`` (default) polishes it to
    the x-independent solution of the discrete scheme, so that the computed
    front approaches its boundary column without an O(h^2) mismatch layer.
    """
    if kind not in ("discrete", "exact"):
        raise DomainError(f"unknown far-field kind {kind!r}")
    return _far_field_cached(model, float(lam), grid.n_y, kind).copy()


# ---------------------------------------------------------------------------
# discrete operators on padded arrays: the output is the interior P[1:-1, 1:-1]


def _face_terms(model, P, hx, hy):
    px = np.diff(P[:, 1:-1], axis=0) / hx
    cy = (P[:, 2:] - P[:, :-2]) / (2 * hy)
    sx = 0.5 * (cy[1:] + cy[:-1])
    py = np.diff(P[1:-1, :], axis=1) / hy
    cx = (P[2:, :] - P[:-2, :]) / (2 * hx)
    sy = 0.5 * (cx[:, 1:] + cx[:, :-1])
    return px, sx, py, sy


def _divergence(model, P, lam, hx, hy):
    px, sx, py, sy = _face_terms(model, P, hx, hy)
    Fx = model.W(px * px + sx * sx, 1) * px
    Fy = model.W(py * py + sy * sy, 1) * py
    return np.diff(Fx, axis=0) / hx + np.diff(Fy, axis=1) / hy - model.b(P[1:-1, 1:-1], lam)


def _linearized(model, P, Vp, lam, hx, hy):
    px, sx, py, sy = _face_terms(model, P, hx, hy)
    dpx, dsx, dpy, dsy = _face_terms(model, Vp, hx, hy)
    qx = px * px + sx * sx
    qy = py * py + sy * sy
    dFx = model.W(qx, 1) * dpx + 2 * model.W(qx, 2) * px * (px * dpx + sx * dsx)
    dFy = model.W(qy, 1) * dpy + 2 * model.W(qy, 2) * py * (py * dpy + sy * dsy)
    return np.diff(dFx, axis=0) / hx + np.diff(dFy, axis=1) / hy - model.b_kappa(P[1:-1, 1:-1], lam) * Vp[1:-1, 1:-1]


def _min_face_ellipticity(model, P, hx, hy):
    px, sx, py, sy = _face_terms(model, P, hx, hy)
    return min(
        float(np.min(model.ellipticity(px * px + sx * sx))),
        float(np.min(model.ellipticity(py * py + sy * sy))),
    )


def _pad_full(u, bc):
    if bc == "neumann":
        return np.concatenate([u[1:2], u, u[-2:-1]], axis=0)
    return u


def _pad_quarter(uq, bc):
    """Ghost row below ``y = 0`` by evenness; ghost column past ``x = L``
    for the Neumann option."""
    P = np.concatenate([uq[:, 1:2], uq], axis=1)
    if bc == "neumann":
        P = np.concatenate([P, P[-2:-1]], axis=0)
    return P


# ---------------------------------------------------------------------------
# public operators on the full strip


def _boundary_data(model, front):
    if front.far_field is not None:
        return front.far_field
    return front.u[-1]


def residual(model: MaterialModel, front: FrontState) -> np.ndarray:
    """Nodal residual on the full strip.

    Interior nodes carry the PDE residual; boundary nodes carry the
    mismatch with their boundary data.
    """
    g = front.grid
    u = front.u
    R = np.zeros_like(u)
    if front.bc == "neumann":
        R[:, 1:-1] = _divergence(model, _pad_full(u, "neumann"), front.lam, g.hx, g.hy)
    else:
        R[1:-1, 1:-1] = _divergence(model, u, front.lam, g.hx, g.hy)
        far = _boundary_data(model, front)
        R[-1] = u[-1] - far
        R[0] = u[0] + far
    R[:, 0] = u[:, 0]
    R[:, -1] = u[:, -1]
    return R


def linearized_apply(model: MaterialModel, front: FrontState, v: np.ndarray) -> np.ndarray:
    """Action of the derivative of the discrete residual on ``v``.

    In the interior this is the discretization of
    ``div(W' grad v + 2 W'' (grad u . grad v) grad u) - b_kappa(u) v``;
    boundary rows are the identity, as in :func:`residual`.
    """
    g = front.grid
    out = np.zeros_like(v, dtype=float)
    if front.bc == "neumann":
        out[:, 1:-1] = _linearized(model, _pad_full(front.u, "neumann"), _pad_full(v, "neumann"), front.lam, g.hx, g.hy)
    else:
        out[1:-1, 1:-1] = _linearized(model, front.u, v, front.lam, g.hx, g.hy)
        out[0] = v[0]
        out[-1] = v[-1]
    out[:, 0] = v[:, 0]
    out[:, -1] = v[:, -1]
    return out


def asymptotic_seed(model: MaterialModel, eps: float, grid: Grid2D | None = None, **grid_kw) -> FrontState:
    """Leading-order small front ``a1 eps tanh(eps x / sqrt 2) cos y`` at ``lam = eps^2``."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    lam = eps * eps
    grid = Grid2D.for_lambda(lam, **grid_kw) if grid is None else grid
    a1 = leading_amplitude(model)
    u = a1 * eps * np.outer(np.tanh(eps * grid.x / math.sqrt(2.0)), np.cos(grid.y))
    u[:, 0] = u[:, -1] = 0.0
    u[grid.n_x // 2] = 0.0
    return FrontState(grid, u, lam)


# ---------------------------------------------------------------------------
# quarter-domain Newton machinery


class QuarterProblem:
    """Unknowns, residual and banded Jacobian on the quarter domain."""

    def __init__(self, model: MaterialModel, grid: Grid2D, lam: float, bc: str = "dirichlet", far: np.ndarray | None = None):
        self.model, self.grid, self.lam, self.bc = model, grid, float(lam), bc
        nxq, nyq = grid.quarter_shape
        self.ix = slice(1, nxq if bc == "neumann" else nxq - 1)
        self.jy = slice(0, nyq - 1)
        self.shape = (len(range(*self.ix.indices(nxq))), nyq - 1)
        self.far_quarter = None if far is None else far[grid.n_y // 2 :]

    @property
    def size(self) -> int:
        return self.shape[0] * self.shape[1]

    def impose(self, uq: np.ndarray) -> np.ndarray:
        uq = uq.copy()
        uq[0] = 0.0
        uq[:, -1] = 0.0
        if self.bc == "dirichlet" and self.far_quarter is not None:
            uq[-1] = self.far_quarter
        return uq

    def unknowns(self, uq):
        return uq[self.ix, self.jy].ravel()

    def with_unknowns(self, uq, z):
        uq = uq.copy()
        uq[self.ix, self.jy] = z.reshape(self.shape)
        return uq

    def residual(self, uq) -> np.ndarray:
        g = self.grid
        return _divergence(self.model, _pad_quarter(uq, self.bc), self.lam, g.hx, g.hy).ravel()

    def apply(self, uq, vq) -> np.ndarray:
        """Jacobian times a quarter-shaped perturbation (boundary entries
        of ``vq`` act as perturbations of the boundary data)."""
        g = self.grid
        return _linearized(self.model, _pad_quarter(uq, self.bc), _pad_quarter(vq, self.bc), self.lam, g.hx, g.hy).ravel()

    def min_ellipticity(self, uq) -> float:
        return _min_face_ellipticity(self.model, _pad_quarter(uq, self.bc), self.grid.hx, self.grid.hy)

    def jacobian_banded(self, uq) -> tuple[np.ndarray, int]:
        """Exact Jacobian in LAPACK band storage, assembled from nine
        colored probes of :meth:`apply` (the stencil is 3x3)."""
        nx, ny = self.shape
        band = ny + 1
        ab = np.zeros((2 * band + 1, nx * ny))
        I, J = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
        rows = (I * ny + J).ravel()
        zero = np.zeros_like(uq)
        for ci in range(3):
            for cj in range(3):
                probe = ((I % 3) == ci) & ((J % 3) == cj)
                vq = self.with_unknowns(zero, probe.astype(float).ravel())
                resp = self.apply(uq, vq)
                # the unique column of this color inside each row's stencil
                dI = (ci - I) % 3
                dI = np.where(dI == 2, -1, dI)
                dJ = (cj - J) % 3
                dJ = np.where(dJ == 2, -1, dJ)
                I2, J2 = I + dI, J + dJ
                ok = ((I2 >= 0) & (I2 < nx) & (J2 >= 0) & (J2 < ny)).ravel()
                cols = (I2 * ny + J2).ravel()
                ab[band + rows[ok] - cols[ok], cols[ok]] = resp[ok]
        return ab, band

    def solve(self, uq, rhs) -> np.ndarray:
        ab, band = self.jacobian_banded(uq)
        return linalg.solve_banded((band, band), ab, rhs, check_finite=False)


def newton_solve(
    model: MaterialModel,
    initial: FrontState,
    tol: float = 1e-10,
    max_iter: int = 30,
    bc: str | None = None,
    far_field: str | np.ndarray = "discrete",
) -> FrontState:
    """Converge ``initial`` to a front with ``max |residual| <= tol``.

    The far-field Dirichlet data are recomputed from the conjugate state at
    ``initial.lam`` unless an array is passed. Steps are damped by halving
    (at most 8 times) until the residual max-norm decreases.
    """
    bc = initial.bc if bc is None else bc
    grid, lam = initial.grid, initial.lam
    if bc == "dirichlet":
        far = far_field if isinstance(far_field, np.ndarray) else far_field_values(model, lam, grid, far_field)
    else:
        far = None
    prob = QuarterProblem(model, grid, lam, bc, far)
    uq = prob.impose(initial.quarter())
    R = prob.residual(uq)
    rnorm = float(np.max(np.abs(R))) if R.size else 0.0
    for it in range(max_iter + 1):
        if rnorm <= tol:
            break
        if it == max_iter:
            raise NonConvergenceError(f"Newton stalled at |R|={rnorm:.3e} after {max_iter} iterations")
        if prob.min_ellipticity(uq) <= 0:
            raise EllipticityError("face ellipticity coefficient became nonpositive")
        dz = prob.solve(uq, -R)
        t = 1.0
        for _ in range(9):
            trial = prob.with_unknowns(uq, prob.unknowns(uq) + t * dz)
            R_trial = prob.residual(trial)
            r_trial = float(np.max(np.abs(R_trial)))
            if r_trial < rnorm:
                break
            t *= 0.5
        else:
            raise NonConvergenceError(f"damping failed to reduce |R|={rnorm:.3e}")
        uq, R, rnorm = trial, R_trial, r_trial
    return FrontState.from_quarter(grid, uq, lam, bc=bc, far_field=far)


# ---------------------------------------------------------------------------
# diagnostics


def _gradients(front: FrontState):
    g = front.grid
    ux = np.gradient(front.u, g.hx, axis=0, edge_order=2)
    uy = np.gradient(front.u, g.hy, axis=1, edge_order=2)
    return ux, uy


def flow_force_columns(model: MaterialModel, front: FrontState) -> np.ndarray:
    """Flow force of every grid column (Simpson in y)."""
    ux, uy = _gradients(front)
    q = ux * ux + uy * uy
    integrand = 0.5 * model.W(q) - ux * ux * model.W(q, 1) + model.B(front.u, front.lam)
    return integrate.simpson(integrand, x=front.grid.y, axis=1)


def flow_force_2d(model: MaterialModel, front: FrontState, x_index: int) -> float:
    """``int W(|grad u|^2)/2 - u_x^2 W'(|grad u|^2) + B(u, lam) dy`` at one column."""
    if not 0 <= x_index < front.grid.n_x:
        raise DomainError("column index out of range")
    return float(flow_force_columns(model, front)[x_index])


@dataclass
class NodalReport:
    """Sign checks on the quarter ``x >= 0, y >= 0``; margin > 0 means satisfied."""

    checks: dict[str, tuple[bool, float]]
    orientation: int = 1

    @property
    def ok(self) -> bool:
        return all(passed for passed, _ in self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [k for k, (p, _) in self.checks.items() if not p]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "orientation": "increasing" if self.orientation > 0 else "decreasing",
            "checks": {k: {"passed": p, "worst_margin": m} for k, (p, m) in self.checks.items()},
        }


def nodal_check(front: FrontState, orientation: int = 1, zero_tol: float = 1e-12) -> NodalReport:
    """Check the monotone-front sign pattern with centred differences.

    Strict inequalities (margins are ``orientation``-adjusted):

    * ``u_x > 0`` at interior nodes, excluding the truncation columns;
    * ``u_y < 0`` for ``x > 0``, ``0 < y <= pi/2``;
    * ``u_yy < 0`` on ``y = 0``, ``x > 0``;
    * ``u_xy < 0`` on ``x = 0``, ``0 < y <= pi/2``;
    * ``u_xyy(0, 0) < 0``.

    Boundary identities ``u = 0`` on the top and on ``x = 0``, ``u_y = 0``
    on ``y = 0`` and ``u_xx = 0`` on ``x = 0`` are checked to ``zero_tol``
    (relative to ``max |u|``). For a decreasing front pass ``orientation=-1``.
    """
    g = front.grid
    s = float(orientation)
    u = s * front.u
    hx, hy = g.hx, g.hy
    ix0, jy0 = g.n_x // 2, g.n_y // 2
    ux, uy = _gradients(FrontState(g, u, front.lam))
    scale = max(float(np.max(np.abs(u))), 1e-300)
    checks: dict[str, tuple[bool, float]] = {}

    def strict(name, values):
        m = float(np.min(values)) if np.size(values) else math.inf
        checks[name] = (m > 0, m)

    strict("u_x_positive", ux[1:-1, 1:-1])
    strict("u_y_negative", -uy[ix0 + 1 :, jy0 + 1 :])
    uyy_bottom = (u[ix0 + 1 :, jy0 + 1] - 2 * u[ix0 + 1 :, jy0] + u[ix0 + 1 :, jy0 - 1]) / hy**2
    strict("u_yy_negative_bottom", -uyy_bottom)
    ux_left = (u[ix0 + 1] - u[ix0 - 1]) / (2 * hx)
    uxy_left = np.gradient(ux_left, hy, edge_order=2)
    strict("u_xy_negative_left", -uxy_left[jy0 + 1 :])
    uxyy_corner = (ux_left[jy0 + 1] - 2 * ux_left[jy0] + ux_left[jy0 - 1]) / hy**2
    strict("u_xyy_corner_negative", np.array([-uxyy_corner]))

    uxx_left = (u[ix0 + 1] - 2 * u[ix0] + u[ix0 - 1]) / hx**2
    zeros = {
        "u_zero_top": np.abs(u[ix0:, -1]),
        "u_zero_left": np.abs(u[ix0, jy0:]),
        "u_y_zero_bottom": np.abs(u[ix0:, jy0 + 1] - u[ix0:, jy0 - 1]) / (2 * hy),
        "u_xx_zero_left": np.abs(uxx_left[jy0:]) * hx * hx,
    }
    for name, vals in zeros.items():
        worst = float(np.max(vals)) / scale
        checks[name] = (worst <= zero_tol, -worst)
    return NodalReport(checks, orientation=int(np.sign(s)))


def max_principle_P(model: MaterialModel, kappa, q, lam):
    """Auxiliary function ``2 q W'(q) - W(q) - 2 B(kappa, lam)``."""
    return 2 * q * model.W(q, 1) - model.W(q) - 2 * model.B(kappa, lam)


@dataclass
class MaxPrincipleReport:
    P_interior_max: float
    P_far_max: float
    argmax_x: float
    slack: float
    coercivity_margin: float  # min over nodes of P - |grad u|^2
    grad_sq_max: float
    P_max: float

    @property
    def max_at_far_field(self) -> bool:
        return self.P_interior_max <= self.P_far_max + self.slack

    @property
    def coercive(self) -> bool:
        return self.coercivity_margin >= 0 and self.grad_sq_max <= self.P_max

    @property
    def ok(self) -> bool:
        return self.max_at_far_field and self.coercive

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d.update(max_at_far_field=self.max_at_far_field, coercive=self.coercive, ok=self.ok)
        return d


def max_principle_check(model: MaterialModel, front: FrontState, slack: float | None = None) -> MaxPrincipleReport:
    """Evaluate the maximum-principle function at every node.

    The interior maximum may exceed the truncation-column maximum only by
    ``slack`` (default ``10 h^2 max(1, P_far)`` with ``h`` the coarser
    spacing), and ``|grad u|^2 <= P`` must hold pointwise.
    """
    g = front.grid
    ux, uy = _gradients(front)
    q = ux * ux + uy * uy
    P = max_principle_P(model, front.u, q, front.lam)
    far = max(float(np.max(P[0])), float(np.max(P[-1])))
    interior = float(np.max(P[1:-1]))
    if slack is None:
        slack = 10.0 * max(g.hx, g.hy) ** 2 * max(1.0, far)
    i_arg = np.unravel_index(np.argmax(P), P.shape)[0]
    return MaxPrincipleReport(
        P_interior_max=interior,
        P_far_max=far,
        argmax_x=float(g.x[i_arg]),
        slack=float(slack),
        coercivity_margin=float(np.min(P - q)),
        grad_sq_max=float(np.max(q)),
        P_max=float(np.max(P)),
    )


def blowup_proxy(front: FrontState) -> float:
    """``max|u| + max|grad u| + max|D^2 u| + lam + 1/lam`` on the grid."""
    if not front.lam > 0:
        raise DomainError("the blowup proxy needs lam > 0")
    g = front.grid
    ux, uy = _gradients(front)
    uxx = np.gradient(ux, g.hx, axis=0, edge_order=2)
    uxy = np.gradient(ux, g.hy, axis=1, edge_order=2)
    uyy = np.gradient(uy, g.hy, axis=1, edge_order=2)
    hess = max(float(np.max(np.abs(a))) for a in (uxx, uxy, uyy))
    return float(np.max(np.abs(front.u)) + np.max(np.hypot(ux, uy)) + hess + front.lam + 1.0 / front.lam)


def write_field(path_csv, front: FrontState) -> None:
    """Write ``x, y, u`` rows (17 significant digits) with a header."""
    X, Y = np.meshgrid(front.grid.x, front.grid.y, indexing="ij")
    with open(path_csv, "w") as fh:
        fh.write("x,y,u\n")
        for xv, yv, uv in zip(X.ravel(), Y.ravel(), front.u.ravel()):
            fh.write(f"{xv:.17g},{yv:.17g},{uv:.17g}\n")
