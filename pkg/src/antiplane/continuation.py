"""Pseudo-arclength continuation of the front branch in ``(u, lam)``.

The extended system is

    R(u, lam) = 0,
    <t_u, u - u_k>_w + t_lam (lam - lam_k) - ds = 0,

where ``<.,.>_w`` is the mean over the quarter-domain unknowns and ``t`` the
unit secant of the last two accepted points. Each corrector iteration
refreshes the far-field Dirichlet column to the discrete conjugate state at
the current ``lam`` and solves the bordered system with one banded
factorization and two right-hand sides.
"""
from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate, linalg

from . import conjugate_flow as cf
from . import front_solver as fs
from . import spectrum
from .errors import AntiplaneError, DomainError, PreconditionError
from .material import MaterialModel, leading_amplitude

__all__ = [
    "Termination",
    "ContinuationControls",
    "BranchPoint",
    "Branch",
    "limiting_state_monitors",
    "seed_tangent",
    "continue_branch",
    "classify_termination",
    "regrid",
]


class Termination(str, enum.Enum):
    BLOWUP = "BLOWUP"
    SPECTRAL_DEGENERACY = "SPECTRAL_DEGENERACY"
    HETEROCLINIC_DEGENERACY = "HETEROCLINIC_DEGENERACY"
    STEP_FAILURE = "STEP_FAILURE"


@dataclass(frozen=True)
class ContinuationControls:
    """Step control and termination ceilings.

    ``ds_min`` defaults to ``ds / 1024``. The blowup ceiling fires when
    ``N_proxy`` rises through ``n_proxy_max`` or ``lam`` exceeds ``lam_max``.
    """

    ds: float = 0.05
    n_steps: int = 40
    ds_max: float = 0.25
    ds_min: float | None = None
    tol: float = 1e-10
    max_iter: int = 12
    easy_iter: int = 4
    n_proxy_max: float = 50.0
    lam_max: float = 10.0
    sigma_tol: float = 1e-4
    far_drift_tol: float = 1e-2
    n_spectral: int = 512
    regrid: bool = True

    def __post_init__(self):
        if not (self.ds > 0 and self.ds_max >= self.ds and self.n_steps >= 1):
            raise DomainError("need ds > 0, ds_max >= ds and n_steps >= 1")

    @property
    def floor(self) -> float:
        return self.ds / 1024.0 if self.ds_min is None else self.ds_min


@dataclass(frozen=True)
class BranchPoint:
    front: fs.FrontState
    s: float
    sigma0: float
    S_plus: float
    N_proxy: float
    nodal: fs.NodalReport
    max_u: float
    max_uy: float
    far_uy: float
    V_plus_max: float
    grad_sq_max: float
    P_max: float
    far_drift: float
    interface_x: float
    newton_iters: int = 0
    ds: float = 0.0

    @property
    def lam(self) -> float:
        return self.front.lam

    @property
    def gradient_bound_ok(self) -> bool:
        return self.grad_sq_max <= self.P_max

    def row(self) -> dict:
        return {
            "s": self.s,
            "lambda": self.lam,
            "max_u": self.max_u,
            "max_uy": self.max_uy,
            "sigma0": self.sigma0,
            "S_plus": self.S_plus,
            "N_proxy": self.N_proxy,
            "nodal_ok": int(self.nodal.ok),
        }


@dataclass
class Branch:
    points: list[BranchPoint] = field(default_factory=list)
    tag: Termination | None = None
    stop: str = ""
    message: str = ""

    ROW_KEYS = ("s", "lambda", "max_u", "max_uy", "sigma0", "S_plus", "N_proxy", "nodal_ok")

    @property
    def lams(self) -> np.ndarray:
        return np.array([p.lam for p in self.points])

    def rows(self) -> list[dict]:
        return [p.row() for p in self.points]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.ROW_KEYS)
            for r in self.rows():
                w.writerow([r["nodal_ok"] if k == "nodal_ok" else f"{r[k]:.17g}" for k in self.ROW_KEYS])

    def summary(self) -> dict:
        lams = self.lams
        return {
            "termination": None if self.tag is None else self.tag.value,
            "stop": self.stop,
            "message": self.message,
            "n_points": len(self.points),
            "lambda_first": float(lams[0]) if lams.size else None,
            "lambda_last": float(lams[-1]) if lams.size else None,
            "lambda_max": float(lams.max()) if lams.size else None,
            "all_nodal_ok": all(p.nodal.ok for p in self.points),
            "all_sigma0_negative": all(p.sigma0 < 0 for p in self.points),
            "all_gradient_bounds_ok": all(p.gradient_bound_ok for p in self.points),
        }


# ---------------------------------------------------------------------------
# monitors


def limiting_state_monitors(model: MaterialModel, lam: float, n: int = 512) -> dict:
    """``sigma0``, ``S(U+)`` and ``max |V+|`` at the conjugate state."""
    prof = cf.u_plus(model, lam, n_steps=2 * n)
    sig = spectrum.principal_eigenvalue(spectrum.assemble_operator(model, prof, lam, n)).sigma0
    return {"sigma0": sig, "S_plus": cf.flow_force_1d(model, prof), "V_plus_max": prof.max_slope}


def _interface_x(front: fs.FrontState) -> float:
    """Positive x where the centreline reaches half its far-field value."""
    g = front.grid
    ix0, jy0 = g.n_x // 2, g.n_y // 2
    line = front.u[ix0:, jy0]
    target = 0.5 * line[-1]
    if target <= 0:
        return math.nan
    k = int(np.argmax(line >= target))
    if k == 0:
        return 0.0
    x = g.x[ix0:]
    return float(np.interp(target, line[k - 1 : k + 1], x[k - 1 : k + 1]))


def _far_drift(model: MaterialModel, front: fs.FrontState) -> float:
    """Relative gap between the ``x = 3L/4`` column and the far-field data."""
    g = front.grid
    far = fs.far_field_values(model, front.lam, g)
    i = int(round(0.875 * (g.n_x - 1)))
    scale = max(float(np.max(np.abs(far))), 1e-300)
    return float(np.max(np.abs(front.u[i] - far))) / scale


def _make_point(model, front, s, ctl, iters=0, ds=0.0) -> BranchPoint:
    mon = limiting_state_monitors(model, front.lam, ctl.n_spectral)
    g = front.grid
    uy = np.gradient(front.u, g.hy, axis=1, edge_order=2)
    mp = fs.max_principle_check(model, front)
    return BranchPoint(
        front=front,
        s=s,
        sigma0=mon["sigma0"],
        S_plus=mon["S_plus"],
        N_proxy=fs.blowup_proxy(front),
        nodal=fs.nodal_check(front),
        max_u=float(np.max(np.abs(front.u))),
        max_uy=float(np.max(np.abs(uy))),
        far_uy=float(max(np.max(np.abs(uy[0])), np.max(np.abs(uy[-1])))),
        V_plus_max=mon["V_plus_max"],
        grad_sq_max=mp.grad_sq_max,
        P_max=mp.P_max,
        far_drift=_far_drift(model, front),
        interface_x=_interface_x(front),
        newton_iters=iters,
        ds=ds,
    )


# ---------------------------------------------------------------------------
# grids


def regrid(front: fs.FrontState, grid: fs.Grid2D) -> np.ndarray:
    """Bilinear re-interpolation of the quarter field onto ``grid``.

    Points beyond the old truncation take the old boundary column.
    """
    old = front.grid
    ix0, jy0 = old.n_x // 2, old.n_y // 2
    f = interpolate.RegularGridInterpolator((old.x[ix0:], old.y[jy0:]), front.quarter(), method="linear")
    nx0, ny0 = grid.n_x // 2, grid.n_y // 2
    X, Y = np.meshgrid(np.minimum(grid.x[nx0:], old.L), grid.y[ny0:], indexing="ij")
    return f(np.stack([X, Y], axis=-1))


def _target_grid(lam: float, n_y: int) -> fs.Grid2D:
    return fs.Grid2D.for_lambda(lam, n_y=n_y)


def _needs_regrid(point: BranchPoint, ctl: ContinuationControls) -> bool:
    g = point.front.grid
    tgt = _target_grid(point.lam, g.n_y)
    too_long = g.L > 1.5 * tgt.L
    too_short = g.L < tgt.L * (1 - 1e-12)
    too_coarse = g.hx * math.sqrt(point.lam) > 0.3
    return too_long or too_short or too_coarse or point.far_drift > ctl.far_drift_tol


# ---------------------------------------------------------------------------
# bordered corrector


def seed_tangent(model: MaterialModel, eps: float, grid: fs.Grid2D) -> tuple[np.ndarray, float]:
    """``(d seed / d eps, d lam / d eps)`` on the quarter grid."""
    a1 = leading_amplitude(model)
    ix0, jy0 = grid.n_x // 2, grid.n_y // 2
    x, y = grid.x[ix0:], grid.y[jy0:]
    z = eps * x / math.sqrt(2.0)
    du = a1 * np.outer(np.tanh(z) + z / np.cosh(z) ** 2, np.cos(y))
    du[:, -1] = 0.0
    return du, 2.0 * eps


def _normalize(tz, tl, n):
    norm = math.sqrt(float(np.dot(tz, tz)) / n + tl * tl)
    return tz / norm, tl / norm


def _corrector(model, grid, zq0, lam0, tz, tl, ds, ctl, bc):
    """Newton on the extended system from the predicted point.

    Returns ``(uq, lam, iterations)`` or raises on failure.
    """
    n_y = grid.n_y
    prob = fs.QuarterProblem(model, grid, lam0, bc)
    n = prob.size
    z_base = prob.unknowns(zq0)
    lam_base = lam0
    # the predictor sits ds along the tangent; the constraint is measured from the base
    z = z_base + ds * tz
    lam = lam_base + ds * tl
    uq = zq0
    for it in range(1, ctl.max_iter + 1):
        if not lam > 0:
            raise AntiplaneError("corrector left lam > 0")
        far = fs.far_field_values(model, lam, grid)
        prob = fs.QuarterProblem(model, grid, lam, bc, far)
        uq = prob.with_unknowns(prob.impose(uq), z)
        R = prob.residual(uq)
        N = float(np.dot(tz, z - z_base)) / n + tl * (lam - lam_base) - ds
        rnorm = float(np.max(np.abs(R)))
        if rnorm <= ctl.tol and abs(N) <= ctl.tol:
            return uq, lam, it - 1
        if prob.min_ellipticity(uq) <= 0:
            raise AntiplaneError("ellipticity lost in corrector")
        # dR/dlam: explicit lam-dependence of b plus the moving far-field column
        dfar = fs.far_field_lambda_derivative(model, lam, grid, far)[n_y // 2 :]
        vq = np.zeros_like(uq)
        if bc == "dirichlet":
            vq[-1] = dfar
        dR = prob.apply(uq, vq) - model.b_lambda(fs._pad_quarter(uq, bc)[1:-1, 1:-1], lam).ravel()
        ab, band = prob.jacobian_banded(uq)
        sol = linalg.solve_banded((band, band), ab, np.column_stack([-R, dR]), check_finite=False)
        a, b = sol[:, 0], sol[:, 1]
        denom = tl - float(np.dot(tz, b)) / n
        if denom == 0:
            raise AntiplaneError("singular bordered system")
        dlam = (-N - float(np.dot(tz, a)) / n) / denom
        z = z + a - dlam * b
        lam = lam + dlam
    raise AntiplaneError("corrector did not converge")


def continue_branch(
    model: MaterialModel,
    start: fs.FrontState,
    controls: ContinuationControls | None = None,
    eps0: float | None = None,
    callback=None,
) -> Branch:
    """Trace the branch from a converged front with ``sigma0 < 0``.

    ``eps0`` selects the first tangent from the asymptotic seed (default
    ``sqrt(start.lam)``). ``callback(point)`` is called after each
    accepted point.
    """
    ctl = ContinuationControls() if controls is None else controls
    bc = start.bc
    if bc != "dirichlet":
        raise DomainError("continuation needs Dirichlet far-field data")
    first = _make_point(model, start, 0.0, ctl)
    if not first.sigma0 < 0:
        raise PreconditionError(f"start has sigma0 = {first.sigma0:.3e} >= 0")
    branch = Branch([first])
    if callback:
        callback(first)
    eps0 = math.sqrt(start.lam) if eps0 is None else eps0
    grid = start.grid
    tz_q, tl = seed_tangent(model, eps0, grid)
    prob = fs.QuarterProblem(model, grid, start.lam, bc)
    tz, tl = _normalize(prob.unknowns(tz_q), tl, prob.size)
    prev_uq = None
    cur_uq, lam = start.quarter().copy(), start.lam
    ds, easy, s = ctl.ds, 0, 0.0

    while len(branch.points) <= ctl.n_steps:
        try:
            uq, lam_new, iters = _corrector(model, grid, cur_uq, lam, tz, tl, ds, ctl, bc)
        except AntiplaneError as exc:
            ds *= 0.5
            easy = 0
            if ds < ctl.floor:
                branch.stop, branch.message = "step_underflow", str(exc)
                break
            continue
        s += ds
        front = fs.FrontState.from_quarter(grid, uq, lam_new, far_field=fs.far_field_values(model, lam_new, grid))
        point = _make_point(model, front, s, ctl, iters, ds)
        branch.points.append(point)
        if callback:
            callback(point)
        if not point.nodal.ok:
            branch.stop = "nodal_failure"
            branch.message = "nodal pattern violated: " + ", ".join(point.nodal.failures)
            break
        if not point.sigma0 < -ctl.sigma_tol:
            branch.stop, branch.message = "sigma0", f"sigma0 = {point.sigma0:.3e}"
            break
        prev = branch.points[-2]
        if lam_new > ctl.lam_max or (point.N_proxy > ctl.n_proxy_max and point.N_proxy > prev.N_proxy):
            branch.stop, branch.message = "ceiling", f"N_proxy = {point.N_proxy:.3f}, lam = {lam_new:.3f}"
            break

        prev_uq, prev_lam = cur_uq, lam
        cur_uq, lam = uq, lam_new
        if ctl.regrid and _needs_regrid(point, ctl):
            new_grid = _target_grid(lam, grid.n_y)
            old_front = fs.FrontState.from_quarter(grid, prev_uq, prev_lam)
            prev_uq = regrid(old_front, new_grid)
            fresh = fs.newton_solve(model, fs.FrontState.from_quarter(new_grid, regrid(front, new_grid), lam))
            cur_uq, grid = fresh.quarter().copy(), new_grid
        prob = fs.QuarterProblem(model, grid, lam, bc)
        tz, tl = _normalize(prob.unknowns(cur_uq) - prob.unknowns(prev_uq), lam - prev_lam, prob.size)

        easy = easy + 1 if iters <= ctl.easy_iter else 0
        if easy >= 3:
            ds, easy = min(2.0 * ds, ctl.ds_max), 0
    else:
        branch.stop = "budget"

    branch.tag = classify_termination(branch, ctl)
    return branch


def classify_termination(branch: Branch, controls: ContinuationControls | None = None) -> Termination:
    """Map the end state of a branch onto the global alternatives.

    ``BLOWUP`` when a ceiling was crossed, or when the step budget ran out
    while ``N_proxy`` and ``lam`` were both still rising over the last three
    points. ``SPECTRAL_DEGENERACY`` when ``sigma0`` reached zero (within
    ``sigma_tol``) with bounded ``N_proxy``. ``HETEROCLINIC_DEGENERACY``
    when the far-field drift exceeds tolerance while the interface has
    moved into the outer half of the truncated domain. Otherwise
    ``STEP_FAILURE``.
    """
    ctl = ContinuationControls() if controls is None else controls
    pts = branch.points
    if not pts:
        return Termination.STEP_FAILURE
    last = pts[-1]
    rising = [b.N_proxy > a.N_proxy for a, b in zip(pts, pts[1:])]
    crossed = last.lam > ctl.lam_max or (last.N_proxy > ctl.n_proxy_max and bool(rising) and rising[-1])
    if branch.stop == "ceiling" or crossed:
        return Termination.BLOWUP
    if last.sigma0 > -ctl.sigma_tol and last.N_proxy <= max(ctl.n_proxy_max, 2.0 + 1.0 / max(last.lam, 1e-300)):
        return Termination.SPECTRAL_DEGENERACY
    L = last.front.grid.L
    if last.far_drift > ctl.far_drift_tol and last.interface_x > 0.5 * L:
        return Termination.HETEROCLINIC_DEGENERACY
    if branch.stop == "budget" and len(pts) >= 4:
        tail = pts[-4:]
        if all(b.N_proxy > a.N_proxy and b.lam > a.lam for a, b in zip(tail, tail[1:])):
            return Termination.BLOWUP
    return Termination.STEP_FAILURE
