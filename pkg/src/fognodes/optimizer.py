"""Closed-form objectives over the fog election probability and their minimizers.

For path-loss exponent ``alpha`` the objective is the expected sum of
``x^alpha`` over end-device links plus ``y^alpha`` over fog-to-cloud links,
written as a function of ``p`` with ``n1 = n p`` fog nodes and
``n0 = n (1 - p)`` end devices::

    J1(p) = pi R (n - np) / (np) + 0.765 n p a
    J2(p) = (n - np) pi^2 R^2 / (2 (np)^2) + 2 n p a^2 / 3
    J4(p) = pi^4 R^4 n (1 - p) / (np)^4 + 0.62 n p a^4

All three are strictly convex on (0, 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import SUPPORTED_ALPHAS, NetworkConfig, OptimizationResult, OutOfModelError

# cloud-distance coefficients as they enter the objectives and their
# derivatives (0.765 = 153/200, 0.62 = 31/50)
CLOUD_COEF = {1: 153.0 / 200.0, 2: 2.0 / 3.0, 4: 31.0 / 50.0}

GRID_STEP = 1e-4
GOLDEN_TOL = 1e-8

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _check_alpha(alpha):
    if alpha not in SUPPORTED_ALPHAS:
        raise ValueError(f"unsupported alpha {alpha!r}; expected one of {SUPPORTED_ALPHAS}")


def _check_p(p):
    arr = np.asarray(p, dtype=float)
    if not np.all((arr > 0) & (arr < 1)):
        raise ValueError(f"p must lie in the open interval (0, 1), got {p}")


@dataclass(frozen=True)
class ObjectiveProfile:
    """The objective for one ``(alpha, a, R, n)`` with its first two derivatives.

    Every method accepts a scalar or an array of probabilities.
    """

    alpha: int
    a: float
    R: float
    n: int

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not (self.a > 0 and self.R > 0 and self.n > 0):
            raise ValueError(f"need a, R, n > 0; got a={self.a}, R={self.R}, n={self.n}")

    @classmethod
    def from_config(cls, cfg: NetworkConfig) -> "ObjectiveProfile":
        return cls(cfg.alpha, cfg.half_side_a, cfg.fog_radius_R, cfg.total_nodes_n)

    def value_at(self, p):
        _check_p(p)
        p = np.asarray(p, dtype=float)
        a, R, n = self.a, self.R, self.n
        np_ = n * p
        if self.alpha == 1:
            out = math.pi * R * (n - np_) / np_ + CLOUD_COEF[1] * np_ * a
        elif self.alpha == 2:
            out = (n - np_) * math.pi**2 * R**2 / (2.0 * np_**2) + CLOUD_COEF[2] * np_ * a**2
        else:
            out = math.pi**4 * R**4 * n * (1.0 - p) / np_**4 + CLOUD_COEF[4] * np_ * a**4
        return out[()] if out.ndim == 0 else out

    def first_derivative_at(self, p):
        _check_p(p)
        p = np.asarray(p, dtype=float)
        a, R, n = self.a, self.R, self.n
        if self.alpha == 1:
            out = (153.0 * a * n * p**2 - 200.0 * math.pi * R) / (200.0 * p**2)
        elif self.alpha == 2:
            c = math.pi**2 * R**2
            out = (4.0 * a**2 * n**2 * p**3 + 3.0 * c * p - 6.0 * c) / (6.0 * n * p**3)
        else:
            c = math.pi**4 * R**4
            out = (31.0 * a**4 * n**4 * p**5 + 150.0 * c * p - 200.0 * c) / (50.0 * n**3 * p**5)
        return out[()] if out.ndim == 0 else out

    def second_derivative_at(self, p):
        _check_p(p)
        p = np.asarray(p, dtype=float)
        R, n = self.R, self.n
        if self.alpha == 1:
            out = 2.0 * math.pi * R / p**3
        elif self.alpha == 2:
            out = math.pi**2 * R**2 * (3.0 - p) / (n * p**4)
        else:
            out = 4.0 * math.pi**4 * R**4 * (5.0 - 3.0 * p) / (n**3 * p**6)
        return out[()] if out.ndim == 0 else out


def objective_value(profile: ObjectiveProfile, p):
    return profile.value_at(p)


def objective_derivatives(profile: ObjectiveProfile, p):
    """Return ``(first, second)`` derivatives of the objective at ``p``."""
    return profile.first_derivative_at(p), profile.second_derivative_at(p)


def analytic_p(alpha: int, a: float, R: float, n: float) -> float:
    """Closed-form optimum election probability.

    For ``alpha`` 2 and 4 the closed form drops the term of the derivative
    that is linear in ``p``, so it is a (very close) approximation of the
    exact minimizer returned by :func:`numeric_p`.

    Raises
    ------
    OutOfModelError
        If the value is not in (0, 1).
    """
    _check_alpha(alpha)
    if alpha == 1:
        p = math.sqrt(200.0 * math.pi * R / (153.0 * a * n))
    elif alpha == 2:
        p = (6.0 * math.pi**2 * R**2 / (4.0 * a**2 * n**2)) ** (1.0 / 3.0)
    else:
        p = (200.0 * math.pi**4 * R**4 / (31.0 * a**4 * n**4)) ** (1.0 / 5.0)
    if not 0 < p < 1:
        raise OutOfModelError(f"closed-form optimum p={p:.6g} for alpha={alpha}, a={a}, R={R}, n={n} is outside (0, 1)")
    return p


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float = GOLDEN_TOL) -> float:
    """Minimize a unimodal ``f`` on ``[lo, hi]`` until the bracket is narrower than ``tol``."""
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)


def numeric_p(profile: ObjectiveProfile, step: float = GRID_STEP, tol: float = GOLDEN_TOL) -> float:
    """Minimize the objective over (0, 1) without using its derivatives.

    A grid of spacing ``step`` locates the minimum, then golden-section
    search refines it inside the two neighbouring grid cells.
    """
    grid = np.arange(1, round(1.0 / step)) * step
    scaled = lambda p: profile.value_at(p) / profile.n  # noqa: E731
    k = int(np.argmin(scaled(grid)))
    if k == 0 or k == grid.size - 1:
        raise OutOfModelError(
            f"objective minimum for alpha={profile.alpha}, n={profile.n} lies within {step} of the boundary"
        )
    return golden_section(lambda p: float(scaled(p)), grid[k - 1], grid[k + 1], tol)


def optimize(cfg: NetworkConfig) -> OptimizationResult:
    profile = ObjectiveProfile.from_config(cfg)
    p_a = analytic_p(cfg.alpha, cfg.half_side_a, cfg.fog_radius_R, cfg.total_nodes_n)
    p_n = numeric_p(profile)
    n = cfg.total_nodes_n
    return OptimizationResult(
        alpha=cfg.alpha,
        total_nodes_n=n,
        p_analytic=p_a,
        p_numeric=p_n,
        fog_count_n1=n * p_a,
        device_count_n0=n * (1.0 - p_a),
        devices_per_fog=(1.0 - p_a) / p_a,
        objective_at_optimum=float(profile.value_at(p_n)),
    )


def inverse_sizing(alpha: int, a: float, R: float, n1_given: float) -> tuple[float, float]:
    """Given a fixed number of fog nodes, return ``(p, n0)``: the election
    probability that makes ``n1_given`` optimal and the number of end devices
    those fog nodes can serve."""
    _check_alpha(alpha)
    if not n1_given > 0:
        raise ValueError(f"n1_given must be > 0, got {n1_given}")
    if alpha == 1:
        p = 200.0 * math.pi * R / (153.0 * a * n1_given)
    elif alpha == 2:
        p = 6.0 * math.pi**2 * R**2 / (4.0 * a**2 * n1_given**2)
    else:
        p = 200.0 * math.pi**4 * R**4 / (31.0 * a**4 * n1_given**4)
    if not 0 < p < 1:
        raise OutOfModelError(f"{n1_given} fog nodes imply p={p:.6g} outside (0, 1) for alpha={alpha}")
    return p, n1_given / p - n1_given
