"""Transversal linearized operator at a limiting state and its principal eigenvalue.

At an x-independent state ``U`` the linearization acting on
x-independent perturbations is the Sturm-Liouville operator

    psi -> (a(y) psi')' - b_kappa(U, lam) psi,    a = W'(U_y^2) + 2 U_y^2 W''(U_y^2),

with Dirichlet conditions at ``y = +-pi/2``. The operator is self-adjoint and
its largest eigenvalue ``sigma0`` has a positive eigenfunction.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import interpolate, linalg

from .conjugate_flow import HALF_PI, TransversalProfile, _rk4, u_plus
from .errors import DiscretizationError, DomainError, EllipticityError
from .material import MaterialModel

__all__ = [
    "TransversalOperator",
    "EigenResult",
    "assemble_operator",
    "principal_eigenvalue",
    "kernel_test_shooting",
    "sigma0_curve",
    "richardson_ratio",
    "write_spectrum_csv",
]


@dataclass(frozen=True)
class TransversalOperator:
    """Second-order conservative discretization on ``n + 1`` uniform nodes.

    ``a_half`` holds the ellipticity coefficient at the ``n`` cell midpoints,
    ``potential`` holds ``-b_kappa(U, lam)`` at the nodes.
    """

    y: np.ndarray
    a_half: np.ndarray
    potential: np.ndarray
    lam: float

    @property
    def h(self) -> float:
        return float(self.y[1] - self.y[0])

    def tridiagonal(self) -> tuple[np.ndarray, np.ndarray]:
        """Diagonal and off-diagonal after eliminating the Dirichlet rows."""
        h2 = self.h**2
        a = self.a_half
        diag = -(a[:-1] + a[1:]) / h2 + self.potential[1:-1]
        off = a[1:-1] / h2
        return diag, off

    def matrix(self) -> np.ndarray:
        d, e = self.tridiagonal()
        return np.diag(d) + np.diag(e, 1) + np.diag(e, -1)


@dataclass(frozen=True)
class EigenResult:
    sigma0: float
    phi: np.ndarray  # includes the zero boundary values, max-normalized
    y: np.ndarray


def _sample_profile(profile: TransversalProfile, y_nodes, y_half):
    """Values of U at nodes and of U_y at midpoints.

    Exact when the profile grid contains the points, cubic Hermite otherwise.
    """
    step_ratio = profile.n_steps / (2 * (y_nodes.size - 1))
    if step_ratio == int(step_ratio):
        k = int(step_ratio)
        return profile.U[:: 2 * k].copy(), profile.V[k :: 2 * k].copy()
    spline = interpolate.CubicHermiteSpline(profile.y, profile.U, profile.V)
    return spline(y_nodes), spline(y_half, 1)


def assemble_operator(model: MaterialModel, profile: TransversalProfile, lam: float | None = None, n: int = 512) -> TransversalOperator:
    if n < 32:
        raise DomainError("need at least 32 cells")
    lam = profile.lam if lam is None else lam
    y = np.linspace(-HALF_PI, HALF_PI, n + 1)
    y_half = 0.5 * (y[1:] + y[:-1])
    U, V_half = _sample_profile(profile, y, y_half)
    a_half = model.ellipticity(V_half**2)
    if np.any(a_half <= 0):
        raise EllipticityError("transversal ellipticity coefficient is nonpositive")
    return TransversalOperator(y=y, a_half=a_half, potential=-model.b_kappa(U, lam), lam=lam)


def principal_eigenvalue(op: TransversalOperator) -> EigenResult:
    d, e = op.tridiagonal()
    m = d.size
    w, v = linalg.eigh_tridiagonal(d, e, select="i", select_range=(m - 1, m - 1))
    phi = v[:, 0]
    phi = phi / phi[np.argmax(np.abs(phi))]
    if np.any(phi <= 0):
        raise DiscretizationError("principal eigenvector changes sign")
    return EigenResult(sigma0=float(w[0]), phi=np.concatenate([[0.0], phi, [0.0]]), y=op.y)


def kernel_test_shooting(model: MaterialModel, profile: TransversalProfile, lam: float | None = None, n_steps: int | None = None) -> float:
    """End value of the slope-derivative solution ``Phi_dot(pi/2)``.

    Integrates ``(a Phi')' - b_kappa(U) Phi = 0`` with ``Phi(-pi/2) = 0``,
    ``Phi'(-pi/2) = 1`` jointly with the state ODE, so coefficients are
    evaluated exactly at every RK4 stage. A nonzero result means the
    transversal operator has trivial kernel. By Sturm comparison the sign
    is opposite to that of ``sigma0``, so it is positive at ``U+(lam)``.
    """
    lam = profile.lam if lam is None else lam
    n_steps = profile.n_steps if n_steps is None else n_steps

    def rhs(U, V, phi, flux):
        a = model.ellipticity(V * V)
        return V, model.b(U, lam) / a, flux / a, model.b_kappa(U, lam) * phi

    V0 = float(profile.V[0])
    a0 = float(model.ellipticity(V0 * V0))
    traj = _rk4(rhs, (0.0, V0, 0.0, a0), math.pi / n_steps, n_steps)
    return float(traj[-1, 2])


def sigma0_curve(model: MaterialModel, eps_list, n: int = 1024) -> np.ndarray:
    """Rows ``(eps, sigma0)`` along ``lam = eps^2``; ``eps = 0`` is the rest state."""
    rows = []
    for eps in eps_list:
        lam = float(eps) ** 2
        if eps == 0:
            y = np.linspace(-HALF_PI, HALF_PI, 2 * n + 1)
            prof = TransversalProfile(0.0, 0.0, y, np.zeros_like(y), np.zeros_like(y))
        else:
            prof = u_plus(model, lam, n_steps=2 * n)
        rows.append((float(eps), principal_eigenvalue(assemble_operator(model, prof, lam, n)).sigma0))
    return np.array(rows)


def richardson_ratio(table: np.ndarray) -> float:
    """Extrapolate ``sigma0 / eps^2`` to ``eps -> 0``.

    Expects rows at ``eps, eps/2, eps/4, ...``. The ratio is even in eps, so
    each level eliminates the next power of ``eps^2``.
    """
    eps, sig = table[:, 0], table[:, 1]
    order = np.argsort(-eps)
    eps, vals = eps[order], (sig / eps**2)[order]
    if not np.allclose(eps[1:] / eps[:-1], 0.5):
        raise DomainError("Richardson extrapolation needs eps halving at each row")
    level = 1
    while vals.size > 1:
        factor = 4.0**level
        vals = (factor * vals[1:] - vals[:-1]) / (factor - 1.0)
        level += 1
    return float(vals[0])


def write_spectrum_csv(path, rows) -> None:
    cols = ["epsilon", "lambda", "sigma0", "phi_dot_end"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in rows:
            w.writerow([f"{row[k]:.17g}" for k in cols])
