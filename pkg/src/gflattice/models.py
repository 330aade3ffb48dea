"""Hatano-Nelson and non-Hermitian SSH chains: parameters, kernels, numerators, matrices.

Conventions
-----------
HN (N sites): ``H[n, n+1] = tL``, ``H[n+1, n] = tR`` so that the eigen-equation
reads ``tR psi_{n-1} + tL psi_{n+1} = E psi_n``. Under PBC the seam carries
``H[0, N-1] = tR`` and ``H[N-1, 0] = tL``.

SSH (N cells): amplitudes are interleaved ``[A1, B1, A2, B2, ...]`` with
intracell ``H[A_n, B_n] = tL``, ``H[B_n, A_n] = tR`` and intercell
``H[A_{n+1}, B_n] = tRp``, ``H[B_n, A_{n+1}] = tLp``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import ConfigError, UnsupportedCombination
from .poly import ComplexPoly


class Kind(str, Enum):
    HN = "hn"
    SSH = "ssh"


class Boundary(str, Enum):
    OBC = "obc"
    PBC = "pbc"


@dataclass(frozen=True)
class Impurity:
    site: int
    strength: complex


def _as_complex(x) -> complex:
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(x.replace(" ", "").replace("i", "j"))
    return complex(x)


def _plain(x: complex):
    x = complex(x)
    return x.real if x.imag == 0 else [x.real, x.imag]


@dataclass(frozen=True)
class ModelSpec:
    kind: Kind
    tL: complex
    tR: complex
    N: int
    bc: Boundary = Boundary.OBC
    tLp: Optional[complex] = None
    tRp: Optional[complex] = None
    impurity: Optional[Impurity] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "bc", Boundary(self.bc))
        object.__setattr__(self, "tL", _as_complex(self.tL))
        object.__setattr__(self, "tR", _as_complex(self.tR))
        if self.tLp is not None:
            object.__setattr__(self, "tLp", _as_complex(self.tLp))
        if self.tRp is not None:
            object.__setattr__(self, "tRp", _as_complex(self.tRp))
        if self.impurity is not None and not isinstance(self.impurity, Impurity):
            site, v = self.impurity
            object.__setattr__(self, "impurity", Impurity(int(site), _as_complex(v)))
        self.validate()

    def validate(self):
        n_min = 1 if self.kind is Kind.SSH else 2  # a single SSH cell is still a 2x2 problem
        if int(self.N) != self.N or self.N < n_min:
            raise ConfigError(f"N must be an integer >= {n_min}, got {self.N!r}")
        if self.tL * self.tR == 0:
            raise ConfigError("tL*tR must be nonzero (otherwise Q(0) = 0)")
        if self.kind is Kind.SSH:
            if self.tLp is None or self.tRp is None:
                raise ConfigError("SSH needs intercell hoppings tLp and tRp")
            if self.tLp * self.tRp == 0:
                raise ConfigError("tLp*tRp must be nonzero")
            if self.bc is Boundary.PBC:
                raise UnsupportedCombination("SSH is supported with open boundaries only")
            if self.impurity is not None:
                raise UnsupportedCombination("SSH with an impurity is not supported")
        if self.impurity is not None:
            if not 1 <= self.impurity.site <= self.N:
                raise ConfigError(f"impurity site must lie in 1..{self.N}")
            if self.bc is Boundary.PBC and self.impurity.site != 1:
                raise UnsupportedCombination("PBC impurity is solved for site 1 only "
                                             "(a ring is translation invariant)")

    # convenience constructors
    @classmethod
    def hn(cls, tL, tR, N, bc="obc", V=None, site=None) -> "ModelSpec":
        imp = None
        if V is not None:
            imp = Impurity(int(site if site is not None else (1 if bc == "pbc" else N // 2)), _as_complex(V))
        return cls(Kind.HN, tL, tR, N, Boundary(bc), impurity=imp)

    @classmethod
    def ssh(cls, tL, tR, tLp, tRp, N) -> "ModelSpec":
        return cls(Kind.SSH, tL, tR, N, Boundary.OBC, tLp, tRp)

    @classmethod
    def ssh_family(cls, lam: float, N: int, r_c: float = 1.25) -> "ModelSpec":
        """tL = r_c*lam, tR = lam/r_c, tLp = tRp = 1: fixed GBZ radius r_c."""
        return cls.ssh(r_c * lam, lam / r_c, 1.0, 1.0, N)

    def with_impurity(self, V, site=None) -> "ModelSpec":
        if site is None:
            site = self.impurity.site if self.impurity else (1 if self.bc is Boundary.PBC else self.N // 2)
        return replace(self, impurity=Impurity(int(site), _as_complex(V)))

    def without_impurity(self) -> "ModelSpec":
        return replace(self, impurity=None)

    @property
    def dim(self) -> int:
        return self.N if self.kind is Kind.HN else 2 * self.N

    @property
    def V(self) -> complex:
        return self.impurity.strength if self.impurity else 0.0

    @property
    def kernel_product(self) -> complex:
        """z1*z2, fixed by the bulk recurrence."""
        if self.kind is Kind.HN:
            return self.tL / self.tR
        return self.tL * self.tLp / (self.tR * self.tRp)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "bc": self.bc.value, "N": int(self.N),
             "tL": _plain(self.tL), "tR": _plain(self.tR)}
        if self.kind is Kind.SSH:
            d["tLp"] = _plain(self.tLp)
            d["tRp"] = _plain(self.tRp)
        if self.impurity is not None:
            d["impurity"] = {"site": self.impurity.site, "V": _plain(self.impurity.strength)}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        try:
            imp = d.get("impurity")
            if imp is not None:
                imp = Impurity(int(imp["site"]), _as_complex(imp["V"]))
            return cls(Kind(d["kind"]), d["tL"], d["tR"], int(d["N"]), Boundary(d.get("bc", "obc")),
                       d.get("tLp"), d.get("tRp"), imp)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid model description: {exc}") from exc


@dataclass(frozen=True)
class BoundaryAmplitudes:
    """psi_1, psi_N (and psi_{N1}) for HN; psi_{A,1}, psi_{B,N} for SSH."""

    first: complex
    last: complex
    impurity: Optional[complex] = None

    def __post_init__(self):
        if self.first == 0 and self.last == 0 and not self.impurity:
            raise ValueError("boundary amplitudes are all zero")


def boundary_amplitudes(model: ModelSpec, psi) -> BoundaryAmplitudes:
    psi = np.asarray(psi, dtype=complex)
    if model.kind is Kind.SSH:
        return BoundaryAmplitudes(complex(psi[0]), complex(psi[-1]))
    imp = complex(psi[model.impurity.site - 1]) if model.impurity else None
    return BoundaryAmplitudes(complex(psi[0]), complex(psi[model.N - 1]), imp)


def _kernel_coeffs(model: ModelSpec, E: complex):
    if model.kind is Kind.HN:
        return model.tL, -E, model.tR
    tL, tR, tLp, tRp = model.tL, model.tR, model.tLp, model.tRp
    return tL * tLp, tR * tL + tLp * tRp - E * E, tR * tRp


def kernel_Q(model: ModelSpec, E: complex) -> ComplexPoly:
    """Bulk kernel: HN ``tR z^2 - E z + tL``; SSH ``(tR z + tLp)(tRp z + tL) - E^2 z``."""
    return ComplexPoly(_kernel_coeffs(model, complex(E)))


def kernel_roots(model: ModelSpec, E: complex) -> tuple[complex, complex]:
    """Both propagating factors, ordered ``|z1| <= |z2|`` (ties: larger arg first).

    Uses the cancellation-free form of the quadratic formula; z2 is recovered
    from the exact product so that ``z1*z2`` holds to rounding.
    """
    c0, c1, c2 = _kernel_coeffs(model, complex(E))
    disc = np.sqrt(complex(c1 * c1 - 4 * c2 * c0))
    if (np.conj(c1) * disc).real < 0:
        disc = -disc
    q = -0.5 * (c1 + disc)
    prod = c0 / c2
    if q == 0:
        za = zb = np.sqrt(complex(prod))
    else:
        za = q / c2
        zb = prod / za
    if abs(za) > abs(zb) or (abs(za) == abs(zb) and np.angle(za) < np.angle(zb)):
        za, zb = zb, za
    return complex(za), complex(zb)


def numerator_P(model: ModelSpec, E: complex, amps: BoundaryAmplitudes):
    """Boundary/impurity numerator; a pair ``(P_A, P_B)`` for SSH."""
    N = model.N
    z = ComplexPoly.monomial(1)
    if model.kind is Kind.SSH:
        tL, tR, tLp, tRp = model.tL, model.tR, model.tLp, model.tRp
        a1, bN = amps.first, amps.last
        PA = (z * ComplexPoly([tL, tRp])).scale(tLp * a1) + ComplexPoly.monomial(N + 2, tRp * E * bN)
        PB = ComplexPoly.monomial(1, tLp * E * a1) + (ComplexPoly([tLp, tR]).shift_degree(N + 1)).scale(tRp * bN)
        return PA, PB
    tL, tR = model.tL, model.tR
    p1, pN = amps.first, amps.last
    V = model.V
    if model.bc is Boundary.OBC:
        inner = ComplexPoly.monomial(0, tL * p1) + ComplexPoly.monomial(N + 1, tR * pN)
        if model.impurity is not None:
            inner = inner - ComplexPoly.monomial(model.impurity.site, V * amps.impurity)
        return z * inner
    inner = ComplexPoly([tL * p1, -tR * pN]) * ComplexPoly([1.0] + [0.0] * (N - 1) + [-1.0])
    if model.impurity is not None:
        inner = inner - ComplexPoly.monomial(1, V * p1)
    return z * inner


def dense_matrix(model: ModelSpec) -> np.ndarray:
    if model.kind is Kind.SSH:
        return ssh_matrix(model.N, model.tL, model.tR, model.tLp, model.tRp)
    N = model.N
    H = np.zeros((N, N), dtype=complex)
    i = np.arange(N - 1)
    H[i, i + 1] = model.tL
    H[i + 1, i] = model.tR
    if model.bc is Boundary.PBC:
        H[0, N - 1] += model.tR
        H[N - 1, 0] += model.tL
    if model.impurity is not None:
        s = model.impurity.site - 1
        H[s, s] += model.impurity.strength
    return H


def ssh_matrix(N: int, tL, tR, tLp, tRp) -> np.ndarray:
    H = np.zeros((2 * N, 2 * N), dtype=complex)
    a = 2 * np.arange(N)
    H[a, a + 1] = tL
    H[a + 1, a] = tR
    a = a[:-1]
    H[a + 2, a + 1] = tRp
    H[a + 1, a + 2] = tLp
    return H


def apply_hamiltonian(model: ModelSpec, psi) -> np.ndarray:
    """H @ psi evaluated from the site recurrences, without forming H."""
    psi = np.asarray(psi, dtype=complex)
    if model.kind is Kind.SSH:
        A, B = psi[0::2], psi[1::2]
        out = np.empty_like(psi)
        HA = model.tL * B
        HA[1:] += model.tRp * B[:-1]
        HB = model.tR * A
        HB[:-1] += model.tLp * A[1:]
        out[0::2] = HA
        out[1::2] = HB
        return out
    if model.bc is Boundary.PBC:
        out = model.tL * np.roll(psi, -1) + model.tR * np.roll(psi, 1)
    else:
        out = np.zeros_like(psi)
        out[:-1] += model.tL * psi[1:]
        out[1:] += model.tR * psi[:-1]
    if model.impurity is not None:
        s = model.impurity.site - 1
        out[s] += model.impurity.strength * psi[s]
    return out


def recurrence_residual(model: ModelSpec, E: complex, psi) -> float:
    """||H psi - E psi|| / ||psi||."""
    psi = np.asarray(psi, dtype=complex)
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        return np.inf
    return float(np.linalg.norm(apply_hamiltonian(model, psi) - E * psi) / nrm)


ModelLike = Union[ModelSpec, dict]
