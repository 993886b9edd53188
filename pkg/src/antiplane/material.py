"""Strain energy and live body force of the anti-plane shear model.

The strain energy is a polynomial in ``q = |grad u|^2``,

    W(q) = q + w1 q^2 + w2 q^3 + w3 q^4,

and the body force ``b(kappa, lam)`` comes from one of two closed families:

``LINEAR``  ``b = -(1 + lam) kappa``            (cubic coefficient b2 = 0)
``TANH``    ``b = -(1 + lam) tanh(kappa)``      (cubic coefficient b2 = 1/3)

Everything downstream only touches the model through the vectorised
evaluators in this module, so a custom law only has to provide the same
derivative tuples.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError

__all__ = [
    "BodyForce",
    "MaterialModel",
    "ConditionResult",
    "ConditionReport",
    "eval_strain",
    "eval_body_force",
    "check_structural_conditions",
    "leading_amplitude",
]

MAX_DEGREE = 4


class BodyForce(str, enum.Enum):
    LINEAR = "linear"
    TANH = "tanh"


@dataclass(frozen=True)
class MaterialModel:
    """Immutable material law.

    Parameters
    ----------
    w_coeffs : tuple of float
        Coefficients of ``W(q)`` in increasing powers of ``q`` starting at
        ``q**1``; the leading entry must be 1 so that ``W'(0) = 1``.
    family : BodyForce
        Built-in body-force family.
    """

    w_coeffs: tuple[float, ...] = (1.0, 1.0)
    family: BodyForce = BodyForce.LINEAR
    # Horner coefficient tuples (highest power first) for W, W', ..., W'''' and W' + 2qW''
    _w: tuple[tuple[float, ...], ...] = field(init=False, repr=False, compare=False, hash=False)
    _ell: tuple[float, ...] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.w_coeffs)
        if not 1 <= len(coeffs) <= MAX_DEGREE:
            raise PreconditionError(f"W must have degree 1..{MAX_DEGREE}, got {len(coeffs)} coefficients")
        if coeffs[0] != 1.0:
            raise PreconditionError("W'(0) must equal 1 (leading coefficient of W is fixed to 1)")
        object.__setattr__(self, "w_coeffs", coeffs)
        object.__setattr__(self, "family", BodyForce(self.family))
        # W(q) = sum_k c_k q^(k+1): polyval wants [c_n, ..., c_1, 0]
        poly = np.array(coeffs[::-1] + (0.0,))
        derivs = [poly]
        for _ in range(4):
            derivs.append(np.polyder(derivs[-1]) if derivs[-1].size > 1 else np.zeros(1))
        object.__setattr__(self, "_w", tuple(tuple(map(float, d)) for d in derivs))
        ell = np.polyadd(derivs[1], np.polymul([2.0, 0.0], derivs[2]))
        object.__setattr__(self, "_ell", tuple(map(float, ell)))

    @classmethod
    def quadratic(cls, w1: float, family: BodyForce | str = BodyForce.LINEAR, extra=()) -> "MaterialModel":
        """Build ``W(q) = q + w1 q^2 + extra[0] q^3 + ...``."""
        return cls(w_coeffs=(1.0, float(w1), *map(float, extra)), family=BodyForce(family))

    @property
    def w1(self) -> float:
        return self.w_coeffs[1] if len(self.w_coeffs) > 1 else 0.0

    @property
    def b2(self) -> float:
        return 1.0 / 3.0 if self.family is BodyForce.TANH else 0.0

    # -- vectorised strain energy ------------------------------------------

    def W(self, q, order: int = 0):
        """``order``-th derivative of W at ``q`` (no domain check)."""
        return _horner(self._w[order], q)

    def ellipticity(self, q):
        """``W'(q) + 2 q W''(q)``: the coefficient that must stay positive."""
        return _horner(self._ell, q)

    def kinetic(self, q):
        """``W'(q) q - W(q)/2``, the slope part of the transversal energy."""
        return self.W(q, 1) * q - 0.5 * self.W(q)

    # -- vectorised body force ---------------------------------------------

    def b(self, kappa, lam):
        if self.family is BodyForce.LINEAR:
            return -(1.0 + lam) * kappa
        return -(1.0 + lam) * np.tanh(kappa)

    def b_kappa(self, kappa, lam):
        if self.family is BodyForce.LINEAR:
            return -(1.0 + lam) + 0.0 * kappa
        return -(1.0 + lam) / np.cosh(kappa) ** 2

    def b_kappa_kappa(self, kappa, lam):
        if self.family is BodyForce.LINEAR:
            return 0.0 * kappa * (1.0 + lam)
        t = np.tanh(kappa)
        return 2.0 * (1.0 + lam) * t * (1.0 - t * t)

    def b_lambda(self, kappa, lam):
        if self.family is BodyForce.LINEAR:
            return -np.asarray(kappa, dtype=float) + 0.0 * lam
        return -np.tanh(kappa) + 0.0 * lam

    def b_over_kappa(self, kappa, lam):
        """``b(kappa, lam) / kappa`` with the analytic limit at ``kappa = 0``."""
        if self.family is BodyForce.LINEAR:
            return -(1.0 + lam) + 0.0 * np.asarray(kappa, dtype=float)
        k = np.asarray(kappa, dtype=float)
        small = np.abs(k) < 1e-8
        safe = np.where(small, 1.0, k)
        return -(1.0 + lam) * np.where(small, 1.0 - k * k / 3.0, np.tanh(safe) / safe)

    def B(self, kappa, lam):
        """Primitive ``int_0^kappa b``; even in kappa and nonpositive."""
        if self.family is BodyForce.LINEAR:
            return -0.5 * (1.0 + lam) * np.asarray(kappa, dtype=float) ** 2
        return -(1.0 + lam) * _log_cosh(kappa)

    def B_lambda(self, kappa, lam):
        if self.family is BodyForce.LINEAR:
            return -0.5 * np.asarray(kappa, dtype=float) ** 2 + 0.0 * lam
        return -_log_cosh(kappa) + 0.0 * lam

    def to_dict(self) -> dict:
        return {"family": self.family.value, "w_coeffs": list(self.w_coeffs)}


def _horner(coeffs, q):
    # plain arithmetic keeps scalar calls cheap inside fixed-step integrators
    r = coeffs[0] + 0.0 * q
    for c in coeffs[1:]:
        r = r * q + c
    return r


def _log_cosh(x):
    a = np.abs(np.asarray(x, dtype=float))
    return a + np.log1p(np.exp(-2.0 * a)) - math.log(2.0)


def eval_strain(model: MaterialModel, q):
    """Return ``(W, W', W'', W''')`` at ``q >= 0``."""
    q_arr = np.asarray(q, dtype=float)
    if np.any(q_arr < 0):
        raise DomainError("strain invariant q must be nonnegative")
    vals = tuple(model.W(q_arr, k) for k in range(4))
    if q_arr.ndim == 0:
        return tuple(float(v) for v in vals)
    return vals


def eval_body_force(model: MaterialModel, kappa, lam):
    """Return ``(b, b_kappa, b_lambda, B)`` at ``(kappa, lam)``, ``lam >= 0``."""
    if np.any(np.asarray(lam) < 0):
        raise DomainError("load parameter lambda must be nonnegative")
    k = np.asarray(kappa, dtype=float)
    vals = (model.b(k, lam), model.b_kappa(k, lam), model.b_lambda(k, lam), model.B(k, lam))
    if k.ndim == 0 and np.ndim(lam) == 0:
        return tuple(float(v) for v in vals)
    return vals


@dataclass(frozen=True)
class ConditionResult:
    passed: bool
    margin: float  # worst sampled margin; positive means satisfied


@dataclass
class ConditionReport:
    """Outcome of the sampled audit of the structural hypotheses."""

    conditions: dict[str, ConditionResult]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    @property
    def failures(self) -> list[str]:
        return [name for name, c in self.conditions.items() if not c.passed]

    def to_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "failures": self.failures,
            "conditions": {
                name: {"passed": c.passed, "worst_margin": c.margin}
                for name, c in self.conditions.items()
            },
        }


def check_structural_conditions(
    model: MaterialModel,
    q_max: float = 10.0,
    kappa_max: float = 10.0,
    lam_max: float = 10.0,
    n_samples: int = 201,
) -> ConditionReport:
    """Audit the global sign conditions on uniform sample grids.

    Nothing here is a proof; each entry records the worst margin seen on
    the grid. Margins are oriented so that ``margin > 0`` (or ``>= 0`` for
    the non-strict ones) means the condition holds.
    """
    if min(q_max, kappa_max, lam_max) <= 0 or n_samples < 2:
        raise DomainError("sampling bounds must be positive and n_samples >= 2")

    q = np.linspace(0.0, q_max, n_samples)[1:]
    k_pos = np.linspace(0.0, kappa_max, n_samples)[1:]
    lam_all = np.linspace(0.0, lam_max, n_samples)
    lam_pos = lam_all[1:]
    K, LAM = np.meshgrid(k_pos, lam_all, indexing="ij")
    out: dict[str, ConditionResult] = {}

    def strict(name, margin):
        out[name] = ConditionResult(bool(margin > 0), float(margin))

    scale = np.maximum(1.0, np.abs(model.b(K, LAM)))
    odd_defect = np.max(np.abs(model.b(-K, LAM) + model.b(K, LAM)) / scale)
    out["b_odd"] = ConditionResult(bool(odd_defect <= 1e-14), -float(odd_defect))

    strict("ellipticity", np.min(model.ellipticity(np.concatenate([[0.0], q]))))
    strict("enhanced_ellipticity", np.min(3.0 * model.W(q, 2) + 2.0 * model.W(q, 3) * q))
    strict("b_decreasing_in_kappa", -np.max(model.b_kappa(K, LAM)))
    convex = np.min(model.b_kappa_kappa(K, LAM))
    out["b_convex_in_kappa"] = ConditionResult(bool(convex >= 0.0), float(convex))
    strict("b_decreasing_in_lambda", -np.max(model.b_lambda(K, LAM)))

    # unboundedness: doubling lambda must push |b| past 10x its value at lam_max
    base = np.abs(model.b(k_pos, lam_max))
    lam_probe, reached = lam_max, np.zeros_like(base, dtype=bool)
    for _ in range(60):
        lam_probe *= 2.0
        reached |= np.abs(model.b(k_pos, lam_probe)) > 10.0 * base
        if reached.all():
            break
    out["b_unbounded_in_lambda"] = ConditionResult(bool(reached.all()), float(reached.mean()))

    strict("b_kappa_origin_below_minus_one", np.min(-1.0 - model.b_kappa(0.0, lam_pos)))
    strict("amplitude_constant", model.b2 + 2.0 * model.w1)
    return ConditionReport(out)


def leading_amplitude(model: MaterialModel) -> float:
    """Amplitude ``a1 = 2 / sqrt(3 (b2 + 2 w1))`` of the small fronts."""
    s = model.b2 + 2.0 * model.w1
    if s <= 0:
        raise PreconditionError(f"b2 + 2 w1 must be positive, got {s}")
    return 2.0 / math.sqrt(3.0 * s)
