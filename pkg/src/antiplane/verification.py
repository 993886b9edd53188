"""Acceptance checks and the independent shooting oracle.

Each ``criterion_*`` function runs one check at its stated tolerance and
returns a :class:`CriterionResult`; :func:`run_all` runs a selection in
order. Branch-based checks share one continuation run through
:func:`reference_branch`.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import conjugate_flow as cf
from . import continuation as ct
from . import front_solver as fs
from . import spectrum
from .material import BodyForce, MaterialModel

__all__ = [
    "CriterionResult",
    "shooting_end_value",
    "shooting_oracle_slope",
    "reference_branch",
    "CRITERIA",
    "run_all",
]

DEFAULT_MODEL = MaterialModel()


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    runtime: float
    budget: float
    detail: dict = field(default_factory=dict)

    @property
    def within_budget(self) -> bool:
        return self.runtime <= self.budget

    @property
    def ok(self) -> bool:
        return self.passed and self.within_budget

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        note = "" if self.within_budget else f" (runtime over budget {self.budget:g}s)"
        return f"[{status}] criterion {self.number:2d}: {self.title} ({self.runtime:.2f}s){note}"

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "ok": self.ok,
            "runtime": self.runtime,
            "budget": self.budget,
            "detail": self.detail,
        }


# ---------------------------------------------------------------------------
# dense shooting oracle: integrates U'' directly from y = -pi/2


def _shoot_rhs(model, lam):
    def rhs(U, V):
        return V, model.b(U, lam) / model.ellipticity(V * V)

    return rhs


def shooting_end_value(model: MaterialModel, mu, lam: float, n_steps: int = 2000):
    """``U(pi/2; mu)`` for ``U(-pi/2) = 0, U'(-pi/2) = mu`` (vectorized RK4)."""
    mu = np.asarray(mu, dtype=float)
    traj = cf._rk4(_shoot_rhs(model, lam), (np.zeros_like(mu), mu), math.pi / n_steps, n_steps)
    return traj[-1, 0]


def _shoot_precise(model, mu, lam):
    def f(_, s):
        return [s[1], model.b(s[0], lam) / model.ellipticity(s[1] ** 2)]

    sol = integrate.solve_ivp(f, (-cf.HALF_PI, cf.HALF_PI), [0.0, mu], method="DOP853", rtol=1e-13, atol=1e-14)
    return float(sol.y[0, -1])


def shooting_oracle_slope(model: MaterialModel, lam: float, n_scan: int = 10_000, xtol: float = 1e-12) -> float:
    """Initial slope of ``U+(lam)`` by scanning and bisection.

    Slopes ``mu`` in ``(0, mu_max]`` are scanned (``mu_max`` doubled until the
    end value is positive), the largest sign change of ``U(pi/2; mu)`` is
    bracketed and then bisected with an adaptive high-order integrator.
    """
    mu_max = 1.0
    while shooting_end_value(model, np.array([mu_max]), lam)[0] <= 0:
        mu_max *= 2.0
        if mu_max > 1e6:
            raise RuntimeError("no positive end value found")
    mu = np.linspace(mu_max / n_scan, mu_max, n_scan)
    end = shooting_end_value(model, mu, lam)
    flips = np.nonzero(np.sign(end[:-1]) != np.sign(end[1:]))[0]
    if flips.size == 0:
        raise RuntimeError("no sign change in the slope scan")
    lo, hi = mu[flips[-1]], mu[flips[-1] + 1]
    f_lo = _shoot_precise(model, lo, lam)
    while hi - lo > xtol * hi:
        mid = 0.5 * (lo + hi)
        f_mid = _shoot_precise(model, mid, lam)
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


# ---------------------------------------------------------------------------
# criteria


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        res = fn(*args, **kw)
        res.runtime = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def criterion_1(model=DEFAULT_MODEL):
    """Small-orbit period limit."""
    errs = {}
    for lam in (0.0, 1.0, 3.0):
        exact = math.pi / math.sqrt(1.0 + lam)
        errs[lam] = abs(cf.period_map(model, 1e-8, lam) - exact) / exact
    return CriterionResult(1, "period-map limit pi/sqrt(1+lam)", max(errs.values()) <= 1e-4, 0, 1.0, {"rel_err": errs})


@_timed
def criterion_2(model=DEFAULT_MODEL):
    """Period map strictly increasing in c."""
    c = np.logspace(-6, 1, 20)
    P = np.array([cf.period_map(model, ci, 1.0) for ci in c])
    gaps = np.diff(P)
    return CriterionResult(2, "period map strictly increasing", bool(np.all(gaps > 0)), 0, 1.0, {"min_gap": float(gaps.min())})


@_timed
def criterion_3(model=DEFAULT_MODEL):
    """Period-map slope against the shooting oracle."""
    errs = {}
    for lam in (0.25, 1.0, 4.0):
        v_map = cf.slope_on_level(model, cf.solve_c1(model, lam), lam)
        errs[lam] = abs(v_map - shooting_oracle_slope(model, lam))
    return CriterionResult(3, "conjugate slope matches shooting oracle", max(errs.values()) <= 1e-6, 0, 10.0, {"abs_err": errs})


@_timed
def criterion_4(model=DEFAULT_MODEL, n_steps=4096):
    """Flow-force symmetry, sign, monotonicity and derivative."""
    lams = np.linspace(0.1, 4.0, 10)
    sym, S, deriv_err = 0.0, [], 0.0
    for lam in lams:
        p = cf.u_plus(model, lam, n_steps)
        sp = cf.flow_force_1d(model, p)
        sym = max(sym, abs(sp - cf.flow_force_1d(model, p.negated())))
        S.append(sp)
        d = 1e-3
        fd = (cf.flow_force_1d(model, cf.u_plus(model, lam + d, n_steps)) - cf.flow_force_1d(model, cf.u_plus(model, lam - d, n_steps))) / (2 * d)
        exact = integrate.simpson(model.B_lambda(p.U, lam), x=p.y)
        deriv_err = max(deriv_err, abs(fd - exact) / abs(exact))
    S = np.array(S)
    ok = sym <= 1e-12 and bool(np.all(S != 0)) and bool(np.all(np.diff(S) < 0)) and deriv_err <= 1e-4
    detail = {"symmetry": sym, "S_plus": S.tolist(), "dS_rel_err": deriv_err}
    return CriterionResult(4, "flow force symmetric, nonzero, decreasing, dS/dlam", ok, 0, 10.0, detail)


@_timed
def criterion_5(model=DEFAULT_MODEL):
    """sigma0 / eps^2 near onset."""
    table = spectrum.sigma0_curve(model, [0.2, 0.1, 0.05])
    ratios = (table[:, 1] / table[:, 0] ** 2).tolist()
    rich = spectrum.richardson_ratio(table)
    ok = -1.15 <= ratios[-1] <= -0.85 and abs(rich + 1.0) <= 0.05
    return CriterionResult(5, "sigma0/eps^2 in [-1.15,-0.85], Richardson within 5% of -1", ok, 0, 5.0, {"ratios": ratios, "richardson": rich})


@_timed
def criterion_6(model=DEFAULT_MODEL):
    """Kernel shooting sign and the trivial kernel."""
    lams = np.linspace(0.5, 5.0, 10)
    vals = [spectrum.kernel_test_shooting(model, cf.u_plus(model, lam)) for lam in lams]
    y = np.linspace(-cf.HALF_PI, cf.HALF_PI, 1025)
    zero = cf.TransversalProfile(0.0, 0.0, y, np.zeros_like(y), np.zeros_like(y))
    trivial = spectrum.kernel_test_shooting(model, zero, lam=0.0)
    ok = all(v < 0 for v in vals) and abs(trivial) <= 1e-8
    return CriterionResult(6, "Phi_dot(pi/2) < 0 on 10 loads, zero at the trivial state", ok, 0, 2.0, {"phi_dot_end": vals, "trivial": trivial})


@_timed
def criterion_7(model=DEFAULT_MODEL):
    """Asymptotic front remainder scaled by eps^2."""
    C = []
    for eps in (0.2, 0.1, 0.05):
        seed = fs.asymptotic_seed(model, eps, n_y=65)
        front = fs.newton_solve(model, seed)
        C.append(float(np.max(np.abs(front.u - seed.u))) / eps**2)
    variation = max(C) / min(C) - 1.0
    return CriterionResult(7, "front remainder / eps^2 varies < 50%", variation < 0.5, 0, 120.0, {"C": C, "variation": variation})


@_timed
def criterion_8(model=DEFAULT_MODEL):
    """Flow force constant across columns."""
    eps = 0.1
    devs, bounds = [], []
    for hx, n_y in ((0.5, 65), (0.25, 129)):
        g = fs.Grid2D.for_lambda(eps * eps, n_y=n_y, hx=hx)
        front = fs.newton_solve(model, fs.asymptotic_seed(model, eps, grid=g))
        S = fs.flow_force_columns(model, front)
        devs.append(float(np.max(np.abs(S - S[g.n_x // 2]))))
        bounds.append(10.0 * max(g.hx, g.hy) ** 2)
    drop = devs[0] / devs[1]
    ok = devs[0] <= bounds[0] and drop >= 3.0
    return CriterionResult(8, "flow force constant in x, O(h^2) deviation", ok, 0, 180.0, {"deviation": devs, "bound": bounds, "drop": drop})


@lru_cache(maxsize=4)
def reference_branch(model: MaterialModel = DEFAULT_MODEL, eps: float = 0.05, n_steps: int = 40):
    """The 40-step branch from ``eps = 0.05`` shared by criteria 9 and 10."""
    t0 = time.perf_counter()
    start = fs.newton_solve(model, fs.asymptotic_seed(model, eps))
    branch = ct.continue_branch(model, start, ct.ContinuationControls(n_steps=n_steps))
    return branch, time.perf_counter() - t0


@_timed
def criterion_9(model=DEFAULT_MODEL):
    """Nodal pattern along the branch."""
    branch, _ = reference_branch(model)
    steps = len(branch.points) - 1
    fails = [i for i, p in enumerate(branch.points) if not p.nodal.ok]
    ok = steps == 40 and not fails
    detail = {"steps": steps, "failed_points": fails, "lambda_last": float(branch.lams[-1]), "termination": branch.tag.value}
    return CriterionResult(9, "nodal pattern at every branch point (40 steps)", ok, 0, 900.0, detail)


@_timed
def criterion_10(model=DEFAULT_MODEL):
    """Gradient bound along the branch and growth of the far-field slope."""
    branch, _ = reference_branch(model)
    grad_ok = all(p.gradient_bound_ok for p in branch.points)
    lams = np.linspace(0.1, 4.0, 20)
    V = np.array([cf.u_plus(model, lam).max_slope for lam in lams])
    grows = bool(np.all(np.diff(V) > 0)) and V[-1] > 2.0 * V[0]
    detail = {"gradient_bound_ok": grad_ok, "V_plus_max": V.tolist()}
    return CriterionResult(10, "gradient bound on branch, |V+| increasing and doubling", grad_ok and grows, 0, 60.0, detail)


@_timed
def criterion_11(model=DEFAULT_MODEL):
    """Second-order grid convergence of the eps = 0.1 front."""
    eps = 0.1
    sols = []
    for hx, n_y in ((1.0, 33), (0.5, 65), (0.25, 129)):
        g = fs.Grid2D.for_lambda(eps * eps, n_y=n_y, hx=hx)
        sols.append(fs.newton_solve(model, fs.asymptotic_seed(model, eps, grid=g)).u)
    d1 = float(np.max(np.abs(sols[0] - sols[1][::2, ::2])))
    d2 = float(np.max(np.abs(sols[1] - sols[2][::2, ::2])))
    factor = d1 / d2
    return CriterionResult(11, "grid convergence factor in [3.5, 4.5]", 3.5 <= factor <= 4.5, 0, 300.0, {"diffs": [d1, d2], "factor": factor})


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 12)}


def run_all(model: MaterialModel = DEFAULT_MODEL, only=None, echo=print) -> list[CriterionResult]:
    """Run the selected criteria (all by default), echoing one line each."""
    results = []
    for i in sorted(CRITERIA) if only is None else only:
        res = CRITERIA[i](model)
        if echo:
            echo(res.line())
        results.append(res)
    return results
