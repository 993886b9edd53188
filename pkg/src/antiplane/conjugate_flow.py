"""x-independent states: period map, the branch c1(lam) and the states U+-.

A transversal state solves

    (W'(U_y^2) U_y)_y - b(U, lam) = 0  on (-pi/2, pi/2),   U(+-pi/2) = 0,

which as a planar system ``U' = V``, ``V' = b(U, lam) / f(V^2)`` with
``f(q) = W'(q) + 2 q W''(q)`` conserves

    H(U, V, lam) = W'(V^2) V^2 - W(V^2)/2 - B(U, lam).

Every orbit is a closed curve around the origin. The positive state
``U+(lam)`` is the orbit at the energy ``c1(lam)`` whose transit time from
``(0, V0)`` to ``(0, -V0)`` equals the strip width ``pi``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from .errors import DivergenceError, DomainError, EllipticityError, NoSolutionError, StepCountError
from .material import MaterialModel

__all__ = [
    "PlanarState",
    "TransversalProfile",
    "PeriodMapSample",
    "hamiltonian",
    "radius_on_level",
    "slope_on_level",
    "period_map",
    "period_limit",
    "solve_c1",
    "integrate_profile",
    "u_plus",
    "u_minus",
    "flow_force_1d",
    "ode_defect",
    "check_conjugate",
    "conjugate_rows",
    "write_conjugate_csv",
]

HALF_PI = 0.5 * math.pi
DEFAULT_QUAD = 64
DEFAULT_STEPS = 512


@dataclass(frozen=True)
class PlanarState:
    U: float
    V: float


@dataclass(frozen=True)
class PeriodMapSample:
    c: float
    lam: float
    P: float


@dataclass(frozen=True)
class TransversalProfile:
    """Orbit of the planar system sampled on a uniform grid of ``[-pi/2, pi/2]``."""

    lam: float
    c: float
    y: np.ndarray
    U: np.ndarray
    V: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.y.size - 1

    @property
    def center_value(self) -> float:
        """``U(0)``; the grid always has an even step count."""
        return float(self.U[self.n_steps // 2])

    @property
    def max_slope(self) -> float:
        return float(np.max(np.abs(self.V)))

    def negated(self) -> "TransversalProfile":
        return TransversalProfile(self.lam, self.c, self.y, -self.U, -self.V)


def hamiltonian(model: MaterialModel, U, V, lam):
    """Conserved quantity of the planar system; nonnegative."""
    return model.kinetic(np.square(V)) - model.B(U, lam)


def _h_and_radial_derivative(model, r, cos_t, sin_t, lam):
    U = r * cos_t
    V = r * sin_t
    q = V * V
    H = model.kinetic(q) - model.B(U, lam)
    # dH/dr = (f(q) q - b(U) U) / r, written without the division
    dH = model.ellipticity(q) * V * sin_t - model.b(U, lam) * cos_t
    return H, dH


def radius_on_level(model: MaterialModel, theta, c: float, lam: float, r_max: float = 1e12):
    """Radius ``r > 0`` with ``H(r cos theta, r sin theta, lam) = c``.

    Vectorised over ``theta``. H increases along every ray, so a doubled
    bracket followed by Newton steps that fall back to bisection whenever
    they leave the bracket converges unconditionally.
    """
    if not c > 0:
        raise DomainError(f"energy level must be positive, got {c}")
    theta = np.asarray(theta, dtype=float)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    kappa0 = -float(model.b_kappa(0.0, lam))
    # quadratic approximation of H near the origin
    r = np.sqrt(2.0 * c / (sin_t**2 + kappa0 * cos_t**2))

    lo = np.zeros_like(r)
    hi = r.copy()
    for _ in range(200):
        H_hi, _ = _h_and_radial_derivative(model, hi, cos_t, sin_t, lam)
        low = H_hi < c
        if not low.any():
            break
        lo = np.where(low, hi, lo)
        hi = np.where(low, 2.0 * hi, hi)
        if np.any(hi > r_max):
            raise DivergenceError(f"no level-set bracket below r_max={r_max:g} (c={c:g}, lam={lam:g})")

    r = np.clip(r, lo, hi)
    for _ in range(100):
        H, dH = _h_and_radial_derivative(model, r, cos_t, sin_t, lam)
        g = H - c
        lo = np.where(g < 0, r, lo)
        hi = np.where(g > 0, r, hi)
        step = g / dH
        r_new = r - step
        outside = (r_new <= lo) | (r_new >= hi) | ~np.isfinite(r_new)
        r_new = np.where(outside, 0.5 * (lo + hi), r_new)
        done = np.abs(r_new - r) <= 4e-16 * r
        r = r_new
        if done.all():
            break
    H, _ = _h_and_radial_derivative(model, r, cos_t, sin_t, lam)
    if np.max(np.abs(H - c)) > 1e-12 * max(1.0, c):
        raise DivergenceError("level-set root did not reach its residual tolerance")
    return r if r.ndim else float(r)


def slope_on_level(model: MaterialModel, c: float, lam: float) -> float:
    """``V0(c) > 0`` with ``H(0, V0, lam) = c``; zero for ``c = 0``."""
    if c == 0:
        return 0.0
    return float(radius_on_level(model, HALF_PI, c, lam))


@lru_cache(maxsize=16)
def _gauss_nodes(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    # map [-1, 1] -> [0, pi/2]
    return 0.25 * math.pi * (x + 1.0), 0.25 * math.pi * w


def period_map(model: MaterialModel, c: float, lam: float, n_quad: int = DEFAULT_QUAD) -> float:
    """Transit time ``P(c, lam)`` from ``(0, V0)`` to ``(0, -V0)``.

    Gauss-Legendre quadrature of the polar-angle integral. The force term
    is evaluated as ``(b(kappa)/kappa) cos^2`` so that the integrand stays
    regular as the orbit shrinks to the origin.
    """
    if not c > 0:
        raise DomainError(f"energy level must be positive, got {c}")
    if lam < 0:
        raise DomainError("load parameter lambda must be nonnegative")
    if n_quad < 8:
        raise DomainError("n_quad must be at least 8")
    theta, weights = _gauss_nodes(int(n_quad))
    r = radius_on_level(model, theta, c, lam)
    s2 = np.sin(theta) ** 2
    c2 = np.cos(theta) ** 2
    f = model.ellipticity(r * r * s2)
    denom = f * s2 - model.b_over_kappa(r * np.cos(theta), lam) * c2
    if np.any(f <= 0) or np.any(denom <= 0):
        raise EllipticityError("nonpositive angular speed: ellipticity or monotonicity of b violated")
    return float(2.0 * np.dot(weights, f / denom))


def period_limit(model: MaterialModel, lam: float) -> float:
    """Small-orbit limit ``pi / sqrt(-b_kappa(0, lam))``."""
    return math.pi / math.sqrt(-float(model.b_kappa(0.0, lam)))


def solve_c1(model: MaterialModel, lam: float, tol: float = 1e-10, n_quad: int = DEFAULT_QUAD) -> float:
    """Energy level of the positive state: ``P(c1, lam) = pi``.

    ``P`` increases in ``c`` from ``period_limit < pi``, so a doubled
    bracket starting at ``c = 1e-6`` contains the unique root.
    """
    if not lam > 0:
        raise NoSolutionError("no positive transversal state for lambda <= 0")
    return _solve_c1_cached(model, float(lam), float(tol), int(n_quad))


@lru_cache(maxsize=512)
def _solve_c1_cached(model, lam, tol, n_quad):
    def g(c):
        return period_map(model, c, lam, n_quad) - math.pi

    c_lo = c_hi = 1e-6
    g_hi = g(c_hi)
    if g_hi > 0:
        # only for tiny lam: walk the lower end down instead
        for _ in range(60):
            c_lo *= 0.5
            if g(c_lo) < 0:
                break
        else:
            raise DivergenceError(f"could not bracket c1 from below at lam={lam:g}")
    else:
        for _ in range(60):
            c_lo, c_hi = c_hi, 2.0 * c_hi
            g_hi = g(c_hi)
            if g_hi > 0:
                break
        else:
            raise DivergenceError(f"period map never exceeded pi at lam={lam:g}; model hypotheses violated?")
    c1 = optimize.brentq(g, c_lo, c_hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(g(c1)) > tol:
        raise DivergenceError(f"|P(c1) - pi| = {abs(g(c1)):.3e} exceeds tol={tol:g}")
    return c1


def _planar_rhs(model, lam):
    def rhs(U, V):
        f = model.ellipticity(V * V)
        return V, model.b(U, lam) / f

    return rhs


def _rk4(rhs, state, h, n_steps):
    """Classical RK4 on a tuple of arrays; returns the stacked trajectory."""
    # scalar states stay Python floats: 0-d array arithmetic dominates otherwise
    s = tuple(float(x) if np.ndim(x) == 0 else np.asarray(x, dtype=float) for x in state)
    out = [s]
    h2, h6 = 0.5 * h, h / 6.0
    for _ in range(n_steps):
        k1 = rhs(*s)
        k2 = rhs(*(x + h2 * k for x, k in zip(s, k1)))
        k3 = rhs(*(x + h2 * k for x, k in zip(s, k2)))
        k4 = rhs(*(x + h * k for x, k in zip(s, k3)))
        s = tuple(x + h6 * (a + 2 * b + 2 * c + d) for x, a, b, c, d in zip(s, k1, k2, k3, k4))
        out.append(s)
    return np.array(out, dtype=float)


def integrate_profile(model: MaterialModel, c: float, lam: float, n_steps: int = DEFAULT_STEPS) -> TransversalProfile:
    """Integrate the orbit through ``(0, V0(c))`` across the strip with RK4.

    Raises :class:`StepCountError` unless the orbit lands on ``U = 0`` at
    ``y = pi/2`` within 1e-8 and conserves ``H`` to ``1e-10 max(1, c)``.
    """
    if n_steps < 64 or n_steps % 2:
        raise DomainError("n_steps must be even and at least 64")
    if c < 0:
        raise DomainError("energy level must be nonnegative")
    y = np.linspace(-HALF_PI, HALF_PI, n_steps + 1)
    if c == 0:
        z = np.zeros_like(y)
        return TransversalProfile(lam, 0.0, y, z, z.copy())
    V0 = slope_on_level(model, c, lam)
    traj = _rk4(_planar_rhs(model, lam), (0.0, V0), math.pi / n_steps, n_steps)
    U, V = traj[:, 0], traj[:, 1]
    end = abs(U[-1])
    drift = float(np.max(np.abs(hamiltonian(model, U, V, lam) - c)))
    if end > 1e-8:
        raise StepCountError(f"|U(pi/2)| = {end:.3e} > 1e-8 with n_steps={n_steps}")
    if drift > 1e-10 * max(1.0, c):
        raise StepCountError(f"H drift {drift:.3e} too large with n_steps={n_steps}")
    return TransversalProfile(lam, c, y, U, V)


def u_plus(model: MaterialModel, lam: float, n_steps: int = DEFAULT_STEPS, max_steps: int = 1 << 16) -> TransversalProfile:
    """Unique positive transversal state; doubles the step count as needed."""
    c1 = solve_c1(model, lam)
    steps = n_steps
    while True:
        try:
            return integrate_profile(model, c1, lam, steps)
        except StepCountError:
            if 2 * steps > max_steps:
                raise
            steps *= 2


def u_minus(model: MaterialModel, lam: float, n_steps: int = DEFAULT_STEPS) -> TransversalProfile:
    return u_plus(model, lam, n_steps).negated()


def flow_force_1d(model: MaterialModel, profile: TransversalProfile, lam: float | None = None) -> float:
    """Flow force of an x-independent state: ``int W(U_y^2)/2 + B(U, lam) dy``."""
    lam = profile.lam if lam is None else lam
    integrand = 0.5 * model.W(profile.V**2) + model.B(profile.U, lam)
    return float(integrate.simpson(integrand, x=profile.y))


def ode_defect(model: MaterialModel, profile: TransversalProfile, lam: float | None = None) -> float:
    """How far a sampled profile is from a solution of the transversal BVP.

    One RK4 step is taken from every node and compared with the next node;
    the boundary values enter directly. Zero (to rounding) for profiles
    produced by :func:`integrate_profile` at the same resolution.
    """
    lam = profile.lam if lam is None else lam
    rhs = _planar_rhs(model, lam)
    h = profile.y[1] - profile.y[0]
    step = _rk4(rhs, (profile.U[:-1], profile.V[:-1]), h, 1)[-1]
    defect = max(np.max(np.abs(step[0] - profile.U[1:])), np.max(np.abs(step[1] - profile.V[1:])))
    return float(max(defect, abs(profile.U[0]), abs(profile.U[-1])))


def check_conjugate(model: MaterialModel, p1: TransversalProfile, p2: TransversalProfile, lam: float, tol: float = 1e-8) -> bool:
    """True iff both profiles solve the BVP and share a flow-force level."""
    if ode_defect(model, p1, lam) > tol or ode_defect(model, p2, lam) > tol:
        return False
    return abs(flow_force_1d(model, p1, lam) - flow_force_1d(model, p2, lam)) <= tol


def conjugate_rows(model: MaterialModel, lams, n_steps: int = DEFAULT_STEPS) -> list[dict]:
    """Diagnostics of ``U+(lam)`` for plotting the transversal branch."""
    rows = []
    for lam in lams:
        prof = u_plus(model, lam, n_steps)
        rows.append(
            {
                "lambda": float(lam),
                "c1": prof.c,
                "S_plus": flow_force_1d(model, prof),
                "U_plus_at_0": prof.center_value,
                "Vmax": prof.max_slope,
                "P_limit": period_limit(model, lam),
            }
        )
    return rows


def write_conjugate_csv(path, rows: list[dict]) -> None:
    cols = ["lambda", "c1", "S_plus", "U_plus_at_0", "Vmax", "P_limit"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in rows:
            w.writerow([f"{row[k]:.17g}" for k in cols])
