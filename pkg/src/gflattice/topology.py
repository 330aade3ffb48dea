"""Winding numbers of the bulk kernel and of the SSH sublattice generating function.

Each winding is computed twice: by trapezoidal quadrature of a logarithmic
derivative on a circle, and by counting zeros and poles inside it.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ContourHitsZero, QuadratureUnstable, UnsupportedCombination
from .models import Kind, ModelSpec, kernel_Q
from .poly import ComplexPoly, roots

K_START = 256
K_MAX = 1 << 22
GAP_TOL = 1e-6
GUARD = 1e-8


@dataclass(frozen=True)
class WindingReport:
    value: int
    radius: float
    points: int
    raw: complex
    gap: float
    count: int

    def to_dict(self) -> dict:
        return asdict(self)


def gbz_radius(model: ModelSpec) -> float:
    """sqrt|tL/tR| for HN, sqrt|tL tLp / (tR tRp)| for SSH."""
    return float(np.sqrt(abs(model.kernel_product)))


def _quadrature(logderiv, radius: float, label: str):
    """(1/2 pi i) of the contour integral of logderiv(z) dz on |z| = radius,
    refined by doubling until two successive values agree."""
    prev = None
    K = K_START
    while K <= K_MAX:
        z = radius * np.exp(2j * np.pi * np.arange(K) / K)
        val = complex(np.mean(z * logderiv(z)))
        if prev is not None and abs(val - prev) <= 1e-10 and abs(val - round(val.real)) <= GAP_TOL:
            return val, K
        prev = val
        K *= 2
    raise QuadratureUnstable(f"{label}: contour quadrature did not settle by {K_MAX} points "
                             f"(last value {prev:.6g})")


def _guard(points, radius: float, label: str):
    for p in np.atleast_1d(points):
        if abs(abs(p) - radius) < GUARD * radius:
            raise ContourHitsZero(f"{label}: singular point {complex(p):.6g} lies on |z| = {radius:g}; "
                                  "nudge E or the radius")


def winding_W(model: ModelSpec, E: complex, radius: float = 1.0) -> WindingReport:
    """-(1/2 pi i) contour integral of d log(Q(z)/z); leftward skin for +1, rightward for -1."""
    Q = kernel_Q(model, E)
    zq = roots(Q).roots
    _guard(zq, radius, "winding_W")
    dQ = Q.derivative()
    raw, K = _quadrature(lambda z: dQ(z) / Q(z) - 1.0 / z, radius, "winding_W")
    raw = -raw
    value = int(round(raw.real))
    count = -(int(np.count_nonzero(np.abs(zq) < radius)) - 1)
    if value != count:
        raise QuadratureUnstable(f"winding_W: quadrature gives {value}, zero count gives {count}")
    return WindingReport(value, float(radius), K, raw, float(abs(raw - value)), count)


def sublattice_gf_zero_energy(model: ModelSpec) -> tuple[ComplexPoly, ComplexPoly]:
    """Numerator and kernel of the A-sublattice generating function at E = 0, first amplitude 1."""
    PA = ComplexPoly([0.0, model.tLp * model.tL, model.tLp * model.tRp])
    Q0 = ComplexPoly([model.tLp, model.tR]) * ComplexPoly([model.tL, model.tRp])
    return PA, Q0


def winding_nuA(model: ModelSpec) -> WindingReport:
    """Sublattice winding on the GBZ circle: 1 when -tLp/tR lies outside it, else 0."""
    if model.kind is not Kind.SSH:
        raise UnsupportedCombination("winding_nuA applies to SSH chains")
    rc = gbz_radius(model)
    edge_zero = -model.tL / model.tRp
    pole = -model.tLp / model.tR
    _guard([edge_zero, pole], rc, "winding_nuA")
    PA, Q0 = sublattice_gf_zero_energy(model)
    dP, dQ = PA.derivative(), Q0.derivative()
    raw, K = _quadrature(lambda z: dP(z) / PA(z) - dQ(z) / Q0(z), rc, "winding_nuA")
    value = int(round(raw.real))
    # zeros {0, edge_zero} minus poles {pole, edge_zero}
    count = 1 + int(abs(edge_zero) < rc) - int(abs(pole) < rc) - int(abs(edge_zero) < rc)
    if value != count:
        raise QuadratureUnstable(f"winding_nuA: quadrature gives {value}, zero/pole count gives {count}")
    return WindingReport(value, rc, K, raw, float(abs(raw - value)), count)
