"""Regularized generating functions of plane waves on infinite Hermitian lattices.

Summing rho^|m| e^{i m (theta - k)} over all sites gives the Poisson kernel,
which tends to a delta comb at theta = k as rho -> 1. Pairing it with the
bulk operator E - 2t cos(theta) therefore measures how far E is from the
dispersion at momentum k.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

QUAD_START = 64
QUAD_MAX = 1 << 22
QUAD_RTOL = 1e-8


@dataclass(frozen=True)
class RegularizedGF:
    rho: float
    k: Union[float, Tuple[float, float]]
    t: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")

    @classmethod
    def from_eps(cls, eps: float, k, t: float = 1.0) -> "RegularizedGF":
        return cls(float(np.exp(-eps)), k, t)

    @property
    def eps(self) -> float:
        return float(-np.log(self.rho))

    def momenta(self) -> tuple:
        return tuple(np.atleast_1d(self.k).astype(float))


def poisson_kernel(rho: float, phi):
    phi = np.asarray(phi, dtype=float)
    return (1.0 - rho * rho) / (1.0 - 2.0 * rho * np.cos(phi) + rho * rho)


def g_eps_1d(r: RegularizedGF, theta):
    return poisson_kernel(r.rho, np.asarray(theta) - r.momenta()[0])


def peak_value(rho: float) -> float:
    return (1.0 + rho) / (1.0 - rho)


def _moments(rho: float, k: float, K: int):
    """Trapezoid averages of G and cos(theta) G over one period."""
    theta = 2 * np.pi * np.arange(K) / K
    g = poisson_kernel(rho, theta - k)
    return np.mean(g), np.mean(np.cos(theta) * g)


def _refine(fn, quad_points: int):
    K = max(int(quad_points), 4)
    prev = fn(K)
    while K < QUAD_MAX:
        K *= 2
        val = fn(K)
        if abs(val - prev) <= QUAD_RTOL * max(abs(val), 1e-300) or val == prev:
            return val, K
        prev = val
    return prev, K


def dispersion_residual_1d(r: RegularizedGF, E: float, quad_points: int = QUAD_START) -> float:
    """|(1/2 pi) * integral of (E - 2t cos theta) G(theta) d theta|."""
    k = r.momenta()[0]

    def fn(K):
        m0, m1 = _moments(r.rho, k, K)
        return abs(E * m0 - 2 * r.t * m1)

    return float(_refine(fn, quad_points)[0])


def dispersion_residual_2d(r: RegularizedGF, E: float, quad_points: int = QUAD_START) -> float:
    """Two-dimensional analogue with the product kernel G(theta_x) G(theta_y).

    The tensor-product trapezoid sum factorizes into one-dimensional moments.
    """
    kx, ky = r.momenta()

    def fn(K):
        x0, x1 = _moments(r.rho, kx, K)
        y0, y1 = _moments(r.rho, ky, K)
        return abs(E * x0 * y0 - 2 * r.t * x1 * y0 - 2 * r.t * x0 * y1)

    return float(_refine(fn, quad_points)[0])


def residual_table(k, t: float, E: float, rhos=(0.9, 0.99, 0.999), dim: int = 1) -> list[tuple[float, float]]:
    fn = dispersion_residual_1d if dim == 1 else dispersion_residual_2d
    return [(float(rho), fn(RegularizedGF(rho, k, t), E)) for rho in rhos]
