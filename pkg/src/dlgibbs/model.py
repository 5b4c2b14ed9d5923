"""State types and conditional updates for the Dirichlet-Laplace normal-means model.

The model is y_j = theta_j + eps_j with unit Gaussian noise and the
scale-mixture prior

    theta_j ~ N(0, psi_j phi_j^2 tau^2),  psi_j ~ Exp(1/2),
    phi ~ Dir(a, ..., a),                 tau ~ Gamma(n a, 1/2),

or equivalently, with lambda_j = phi_j tau,

    theta_j ~ N(0, psi_j lambda_j^2),     lambda_j ~ Gamma(a, 1/2) iid.

This module provides each conditional-distribution update as an order-free
building block; composing them into transition kernels (where the update
order is load-bearing) happens in :mod:`dlgibbs.kernels`.

Numerical guards: |theta_j| is clamped below at THETA_FLOOR = 1e-10 inside
the hyperparameter updates (the posterior puts zero mass on theta_j = 0, so
the clamp only covers floating-point underflow, but without it the iG mean
diverges and the GIG conditionals turn improper).  Dirichlet components
below PHI_FLOOR = 1e-300 are redrawn (then clamped) in the prior so that the
tau update can divide by phi_j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _compiled as _c
from .errors import DegenerateStateError, ParameterError
from .rng import RngStream

__all__ = [
    "THETA_FLOOR",
    "PHI_FLOOR",
    "PriorConfig",
    "HyperState",
    "AltHyperState",
    "conditional_variances",
    "update_theta",
    "update_psi",
    "update_tau",
    "update_phi",
    "update_lambda",
    "prior_draw_hyper",
    "prior_draw_hyper_alt",
    "prior_draw_theta",
]

THETA_FLOOR = _c.THETA_FLOOR
PHI_FLOOR = _c.PHI_FLOOR


@dataclass(frozen=True)
class PriorConfig:
    """Dimension n and Dirichlet concentration a; a <= 1 is the regime of interest."""

    n: int
    a: float

    def __post_init__(self):
        if int(self.n) < 1:
            raise ParameterError(f"n must be >= 1, got {self.n}")
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise ParameterError(f"a must be a positive finite real, got {self.a}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "a", float(self.a))


def _as_vector(x, name: str, n: int | None = None) -> np.ndarray:
    v = np.ascontiguousarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ParameterError(f"{name} must be a 1-d vector, got shape {v.shape}")
    if n is not None and v.size != n:
        raise ParameterError(f"{name} must have length {n}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ParameterError(f"{name} must be finite everywhere")
    return v


def _check_positive_vector(v: np.ndarray, name: str) -> None:
    if np.any(v <= 0.0):
        raise ParameterError(f"{name} must be strictly positive everywhere")


@dataclass
class HyperState:
    """kappa = (psi, phi, tau) in the standard parameterization."""

    psi: np.ndarray
    phi: np.ndarray
    tau: float

    def __post_init__(self):
        self.psi = _as_vector(self.psi, "psi")
        self.phi = _as_vector(self.phi, "phi", self.psi.size)
        self.tau = float(self.tau)
        _check_positive_vector(self.psi, "psi")
        if np.any(self.phi < 0.0):
            raise ParameterError("phi must be nonnegative")
        if abs(self.phi.sum() - 1.0) > 1e-10:
            raise ParameterError(f"phi must lie on the simplex, sums to {self.phi.sum()!r}")
        if not (math.isfinite(self.tau) and self.tau > 0.0):
            raise ParameterError(f"tau must be a positive finite real, got {self.tau}")

    @property
    def n(self) -> int:
        return self.psi.size


@dataclass
class AltHyperState:
    """kappa = (psi, lambda) in the alternative parameterization."""

    psi: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        self.psi = _as_vector(self.psi, "psi")
        self.lam = _as_vector(self.lam, "lambda", self.psi.size)
        _check_positive_vector(self.psi, "psi")
        _check_positive_vector(self.lam, "lambda")

    @property
    def n(self) -> int:
        return self.psi.size


def _theta_scales(hyper: HyperState | AltHyperState) -> np.ndarray:
    """Per-coordinate prior standard-deviation factor: phi_j tau or lambda_j."""
    if isinstance(hyper, HyperState):
        return hyper.phi * hyper.tau
    if isinstance(hyper, AltHyperState):
        return hyper.lam
    raise ParameterError(f"expected HyperState or AltHyperState, got {type(hyper)!r}")


def conditional_variances(hyper: HyperState | AltHyperState) -> np.ndarray:
    """sigma_j^2 = (1 + 1/(psi_j phi_j^2 tau^2))^-1, each in (0, 1).

    Raises DegenerateStateError if any scale component is exactly zero.
    """
    scale = _theta_scales(hyper)
    if np.any(scale == 0.0) or np.any(hyper.psi == 0.0):
        raise DegenerateStateError("zero scale component in hyper state")
    with np.errstate(over="ignore"):  # overflow -> inf -> the sigma^2 -> 1 limit
        t = hyper.psi * scale * scale
        return 1.0 / (1.0 + 1.0 / t)


def update_theta(y, hyper: HyperState | AltHyperState, rng: RngStream) -> np.ndarray:
    """Full-conditional draw theta_j ~ N(sigma_j^2 y_j, sigma_j^2), independent over j."""
    scale = _theta_scales(hyper)
    y = _as_vector(y, "y", hyper.n)
    out = np.empty(hyper.n)
    _c.update_theta_post(rng.gen, y, hyper.psi, scale, out)
    return out


def update_psi(theta, scales, rng: RngStream) -> np.ndarray:
    """psi_j = 1/psi~_j with psi~_j ~ iG(scale_j / |theta_j|, 1), independent over j.

    scales is the per-coordinate vector phi_j tau (standard parameterization)
    or lambda_j (alternative); |theta_j| is floored at THETA_FLOOR.
    """
    theta = _as_vector(theta, "theta")
    scales = _as_vector(scales, "scales", theta.size)
    _check_positive_vector(scales, "scales")
    out = np.empty(theta.size)
    _c.update_psi_block(rng.gen, theta, scales, out)
    return out


def update_tau(theta, phi, config: PriorConfig, rng: RngStream) -> float:
    """tau ~ GIG(n a - n, 1, 2 sum_j |theta_j| / phi_j), with |theta_j| floored."""
    theta = _as_vector(theta, "theta", config.n)
    phi = _as_vector(phi, "phi", config.n)
    _check_positive_vector(phi, "phi")
    return _c.update_tau_block(rng.gen, theta, phi, config.a)


def update_phi(theta, config: PriorConfig, rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """T_j ~ GIG(a - 1, 1, 2 |theta_j|) independent; returns (phi = T/sum T, T).

    The unnormalized draws are returned alongside phi so tests and the
    correctness harness can inspect them.
    """
    theta = _as_vector(theta, "theta", config.n)
    T = np.empty(config.n)
    _c.draw_theta_gig_block(rng.gen, theta, config.a, T)
    return T / T.sum(), T


def update_lambda(theta, config: PriorConfig, rng: RngStream) -> np.ndarray:
    """lambda_j ~ GIG(a - 1, 1, 2 |theta_j|): same conditional as update_phi's T,
    kept unnormalized (the point of the alternative parameterization).

    Shares the draw code path with update_phi, which enforces the marginal
    identity T_j =d= lambda_j by construction.
    """
    theta = _as_vector(theta, "theta", config.n)
    out = np.empty(config.n)
    _c.draw_theta_gig_block(rng.gen, theta, config.a, out)
    return out


def prior_draw_hyper(config: PriorConfig, rng: RngStream) -> HyperState:
    """One draw of (psi, phi, tau) from the prior."""
    psi = np.empty(config.n)
    phi = np.empty(config.n)
    tau = _c.draw_prior_standard(rng.gen, config.a, psi, phi)
    return HyperState(psi=psi, phi=phi, tau=tau)


def prior_draw_hyper_alt(config: PriorConfig, rng: RngStream) -> AltHyperState:
    """One draw of (psi, lambda) from the alternative-parameterization prior."""
    psi = np.empty(config.n)
    lam = np.empty(config.n)
    _c.draw_prior_alt(rng.gen, config.a, psi, lam)
    return AltHyperState(psi=psi, lam=lam)


def prior_draw_theta(hyper: HyperState | AltHyperState, rng: RngStream) -> np.ndarray:
    """theta_j ~ N(0, psi_j phi_j^2 tau^2) (resp. N(0, psi_j lambda_j^2))."""
    scale = _theta_scales(hyper)
    out = np.empty(hyper.n)
    _c.draw_theta_prior(rng.gen, hyper.psi, scale, out)
    return out
