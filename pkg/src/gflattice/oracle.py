"""Reference spectra and eigenvectors computed straight from the matrix.

Nothing here touches generating functions or propagating factors:
eigenvalues are zeros of det(H - E) located by simultaneous Newton
iteration on the determinant, eigenvectors come from inverse iteration.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve, solve_banded
from scipy.optimize import linear_sum_assignment

from .errors import InterpolationIllConditioned, NonConvergence, SlowConvergence
from .models import ModelSpec, dense_matrix
from .poly import ComplexPoly, aberth

DIM_CAP = 400
CERT_TOL = 1e-8
CLUSTER_TOL = 1e-7


@dataclass
class OracleSpectrum:
    eigenvalues: np.ndarray
    charpoly: ComplexPoly
    samples: np.ndarray
    dets: np.ndarray
    certificates: np.ndarray = field(default=None)
    radius: float = 0.0

    @property
    def diameter(self) -> float:
        return spectral_diameter(self.eigenvalues)


def spectral_diameter(E) -> float:
    E = np.asarray(E, dtype=complex)
    if E.size < 2:
        return 0.0
    return float(np.max(np.abs(E[:, None] - E[None, :])))


def det_dense(H: np.ndarray, E: complex) -> complex:
    """det(H - E) as the signed product of LU pivots (partial pivoting)."""
    A = np.asarray(H, dtype=complex) - E * np.eye(H.shape[0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)  # exact zero pivot: det = 0 is a valid answer
        lu, piv = lu_factor(A, check_finite=False)
    sign = (-1) ** int(np.count_nonzero(piv != np.arange(piv.size)))
    return complex(sign * np.prod(np.diag(lu)))


def det_at(model: ModelSpec, E: complex) -> complex:
    return det_dense(dense_matrix(model), E)


def det_recurrence_hn(model: ModelSpec, E: complex) -> complex:
    """Three-term continuant for a clean open HN chain, det(H - E)."""
    d_prev, d = 1.0 + 0j, -E
    for _ in range(model.N - 1):
        d_prev, d = d, -E * d - model.tL * model.tR * d_prev
    return complex(d)


def _bandwidths(H: np.ndarray) -> tuple[int, int]:
    r, c = np.nonzero(H)
    if r.size == 0:
        return 0, 0
    return int(max(0, np.max(r - c))), int(max(0, np.max(c - r)))


def _trace_inverse(H: np.ndarray):
    """Vectorized E -> tr((H - E)^-1); banded solves when H is narrow."""
    d = H.shape[0]
    lo, up = _bandwidths(H)
    eye = np.eye(d, dtype=complex)
    if lo + up + 1 < d // 2:
        ab = np.zeros((lo + up + 1, d), dtype=complex)
        for k in range(-lo, up + 1):
            diag = np.diagonal(H, k)
            if k >= 0:
                ab[up - k, k:] = diag
            else:
                ab[up - k, :k] = diag

        def tr(E):
            out = np.empty(len(E), dtype=complex)
            for i, e in enumerate(E):
                a = ab.copy()
                a[up] -= e
                try:
                    out[i] = np.trace(solve_banded((lo, up), a, eye, check_finite=False))
                except np.linalg.LinAlgError:
                    out[i] = np.inf
            return out
        return tr

    def tr(E):
        A = H[None, :, :] - np.asarray(E)[:, None, None] * eye
        try:
            return np.trace(np.linalg.inv(A), axis1=1, axis2=2)
        except np.linalg.LinAlgError:
            out = np.empty(len(E), dtype=complex)
            for i, a in enumerate(A):
                try:
                    out[i] = np.trace(np.linalg.inv(a))
                except np.linalg.LinAlgError:
                    out[i] = np.inf
            return out
    return tr


def gershgorin_radius(H: np.ndarray) -> float:
    return float(max(np.max(np.sum(np.abs(H), axis=1)), 1e-300))


def interpolate_charpoly(H: np.ndarray, radius: float):
    """Coefficients of det(H - E) from its values at d+1 points on |E| = radius.

    The samples are equispaced on the circle, where interpolation in the
    scaled monomial basis is a discrete Fourier transform. Validated at
    off-grid points on the same circle.
    """
    d = H.shape[0]
    n = d + 1
    E = radius * np.exp(2j * np.pi * np.arange(n) / n)
    with np.errstate(over="ignore", invalid="ignore"):
        dets = np.array([det_dense(H, e) for e in E])
    if not np.all(np.isfinite(dets)):
        raise InterpolationIllConditioned(f"determinant overflows on |E| = {radius:g}; use a smaller radius")
    c_scaled = np.fft.fft(dets) / n  # coefficients of det(H - radius*w) in w
    coeffs = c_scaled / radius ** np.arange(n)
    poly = ComplexPoly(coeffs)
    probe = radius * np.exp(2j * np.pi * (np.arange(4) + 0.37) / 4)
    ref = np.array([det_dense(H, e) for e in probe])
    err = np.max(np.abs(np.polyval(c_scaled[::-1], probe / radius) - ref)) / np.max(np.abs(dets))
    if not err <= CERT_TOL:
        raise InterpolationIllConditioned(
            f"characteristic polynomial interpolant misses off-grid samples by {err:.2e}; "
            "rescale the sampling radius")
    return poly, E, dets


def oracle_spectrum(model_or_matrix, seed: int = 0, cap: int = DIM_CAP) -> OracleSpectrum:
    H = dense_matrix(model_or_matrix) if isinstance(model_or_matrix, ModelSpec) else np.asarray(model_or_matrix, complex)
    d = H.shape[0]
    if d > cap:
        raise ValueError(f"dimension {d} exceeds the oracle cap {cap}")
    R0 = gershgorin_radius(H)
    poly, samples, dets = interpolate_charpoly(H, 2 * R0)
    scale = float(np.max(np.abs(dets)))
    tr = _trace_inverse(H)

    def ratio(E):
        t = tr(E)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = -1.0 / t
        return np.where(np.isfinite(t), r, 0.0)

    rng = np.random.default_rng(seed)
    for attempt in range(4):
        phase = rng.uniform(0, 2 * np.pi)
        z0 = 0.5 * R0 * np.exp(1j * (2 * np.pi * np.arange(d) / d + phase)) * (1 + 1e-3 * rng.standard_normal(d))
        z, conv, _ = aberth(ratio, z0, step_tol=1e-15, abs_scale=R0)
        cert = np.array([abs(det_dense(H, e)) / scale for e in z])
        if np.all(cert <= CERT_TOL) and np.all(np.isfinite(z)):
            break
    else:
        raise NonConvergence(f"oracle: {np.count_nonzero(cert > CERT_TOL)} eigenvalues not certified",
                             roots=z, residuals=cert)
    order = np.lexsort((np.round(z.imag, 12), np.round(z.real, 12)))
    return OracleSpectrum(z[order], poly, samples, dets, cert[order], 2 * R0)


def oracle_eigenvector(model_or_matrix, E: complex, seed: int = 0, maxiter: int = 10,
                       tol: float = 1e-9) -> np.ndarray:
    """Inverse iteration at a slightly shifted E; returns psi with max|psi| = 1."""
    H = dense_matrix(model_or_matrix) if isinstance(model_or_matrix, ModelSpec) else np.asarray(model_or_matrix, complex)
    d = H.shape[0]
    diam = max(gershgorin_radius(H), 1e-300) * 2
    shift = E + 1e-10 * diam
    lu = lu_factor(H - shift * np.eye(d), check_finite=False)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    res = np.inf
    prev = None
    for _ in range(maxiter):
        x = lu_solve(lu, x, check_finite=False)
        x = x / x[np.argmax(np.abs(x))]
        res = np.linalg.norm(H @ x - E * x) / np.linalg.norm(x)
        if res <= tol * max(1.0, diam):
            break
        prev = x
    else:
        cands = [x] if prev is None else [prev, x]
        raise SlowConvergence(f"inverse iteration stalled at residual {res:.2e} "
                              "(nearly degenerate eigenvalue?)", candidates=cands)
    k = int(np.argmax(np.abs(x)))
    x = x / x[k]
    x[k] = 1.0
    return x


@dataclass
class Comparison:
    max_dE: float
    diameter: float
    rel_dE: float
    min_overlap: float
    overlaps: list
    matching: list


def overlap(a, b) -> float:
    a = np.asarray(a, complex)
    b = np.asarray(b, complex)
    return float(abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)))


def match_spectra(E_a, E_b) -> tuple[np.ndarray, np.ndarray, float]:
    """Optimal bipartite nearest matching; returns index arrays and max |dE|."""
    E_a = np.asarray(E_a, complex)
    E_b = np.asarray(E_b, complex)
    C = np.abs(E_a[:, None] - E_b[None, :])
    i, j = linear_sum_assignment(C)
    return i, j, float(C[i, j].max()) if i.size else 0.0


def simple_mask(E, tol: float = CLUSTER_TOL) -> np.ndarray:
    E = np.asarray(E, complex)
    diam = spectral_diameter(E)
    D = np.abs(E[:, None] - E[None, :])
    np.fill_diagonal(D, np.inf)
    return D.min(axis=1) > tol * max(diam, 1e-300)


def compare(result, seed: int = 0, vectors: bool = True) -> Comparison:
    """Match a solver result against the oracle: eigenvalues, then eigenvectors
    of the simple eigenvalues."""
    model = result.model
    H = dense_matrix(model)
    orc = oracle_spectrum(H, seed=seed)
    Es = result.eigenvalues
    i, j, dmax = match_spectra(Es, orc.eigenvalues)
    diam = spectral_diameter(orc.eigenvalues)
    overlaps = []
    if vectors:
        simple = simple_mask(orc.eigenvalues)
        for a, b in zip(i, j):
            if simple[b]:
                v = oracle_eigenvector(H, orc.eigenvalues[b], seed=seed)
                overlaps.append(overlap(result.pairs[a].psi, v))
    rel = dmax / diam if diam > 0 else dmax
    return Comparison(dmax, diam, rel, min(overlaps, default=1.0), overlaps,
                      [(int(a), int(b)) for a, b in zip(i, j)])
