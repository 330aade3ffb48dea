"""Eigenpairs from the zero-cancellation condition on the generating function.

An energy E is admissible when both zeros of the bulk kernel Q(z; E) are also
zeros of the boundary numerator P(z). Each solver enumerates the admissible
(E, z1, z2) and rebuilds the amplitudes from the propagating factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateKernel, MissedRoots, UnsupportedCombination
from .poly import ComplexPoly, aberth, backward_residual, roots
from .models import (Boundary, Kind, ModelSpec, boundary_amplitudes, kernel_roots,
                     numerator_P, recurrence_residual)
from .topology import gbz_radius

SOLVER_TOL = 1e-8
# |z1/z2|**(N+1) beyond this (or below its inverse) marks a pair as off the GBZ circle
OFF_CIRCLE_RATIO = 1e2
# |z| within this relative band of 1 counts as extended
SKIN_BAND = 1e-8

TAGS = ("bulk", "edge", "impurity-bound", "skin-left", "skin-right", "extended")


@dataclass
class EigenPair:
    E: complex
    z1: complex
    z2: complex
    psi: np.ndarray
    residuals: dict = field(default_factory=dict)
    tags: tuple = ()

    def to_dict(self) -> dict:
        return {"E": complex(self.E), "z1": complex(self.z1), "z2": complex(self.z2),
                "psi": np.asarray(self.psi, dtype=complex), "residuals": dict(self.residuals),
                "tags": list(self.tags)}


@dataclass
class SpectralResult:
    model: ModelSpec
    pairs: list
    gbz_radius: float
    pairing: list = field(default_factory=list)
    tol: float = SOLVER_TOL
    seed: int = 0
    diagnostics: dict = field(default_factory=dict)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([p.E for p in self.pairs], dtype=complex)

    def __len__(self):
        return len(self.pairs)

    def validate(self, tol: Optional[float] = None) -> list:
        """List of invariant violations (empty when the result is consistent)."""
        tol = self.tol if tol is None else tol
        problems = []
        if len(self.pairs) != self.model.dim:
            problems.append(f"{len(self.pairs)} pairs for dimension {self.model.dim}")
        prod = self.model.kernel_product
        for i, p in enumerate(self.pairs):
            if abs(p.z1 * p.z2 - prod) > 1e-10 * abs(prod):
                problems.append(f"pair {i}: z1*z2 = {p.z1 * p.z2} != {prod}")
            for key in ("cancellation", "recurrence"):
                if not p.residuals.get(key, np.inf) <= tol:
                    problems.append(f"pair {i}: {key} residual {p.residuals.get(key)}")
            if abs(np.max(np.abs(p.psi)) - 1) > 1e-12:
                problems.append(f"pair {i}: psi not max-normalized")
            if not set(p.tags) <= set(TAGS):
                problems.append(f"pair {i}: unknown tags {p.tags}")
        return problems


def normalize_max(psi) -> np.ndarray:
    """Scale so the largest component is exactly 1 (real)."""
    psi = np.asarray(psi, dtype=complex)
    k = int(np.argmax(np.abs(psi)))
    out = psi / psi[k]
    out[k] = 1.0
    return out


def cancellation_residual(model: ModelSpec, E, psi, zs=None) -> float:
    """max over both kernel zeros of the backward residual of P (all numerators for SSH)."""
    amps = boundary_amplitudes(model, psi)
    P = numerator_P(model, E, amps)
    Ps = P if isinstance(P, tuple) else (P,)
    zs = kernel_roots(model, E) if zs is None else zs
    return float(max(np.max(backward_residual(Pk, np.asarray(zs))) for Pk in Ps))


def _skin_tag(radius: float) -> str:
    if radius > 1 + SKIN_BAND:
        return "skin-left"
    if radius < 1 - SKIN_BAND:
        return "skin-right"
    return "extended"


def _off_circle(z1, z2, N) -> bool:
    lr = abs(np.log(abs(z1)) - np.log(abs(z2)))
    return lr * (N + 1) > np.log(OFF_CIRCLE_RATIO)


def _finish_pair(model: ModelSpec, E, z1, z2, psi, tags) -> EigenPair:
    psi = normalize_max(psi)
    res = {"cancellation": cancellation_residual(model, E, psi),
           "recurrence": recurrence_residual(model, E, psi)}
    return EigenPair(complex(E), complex(z1), complex(z2), psi, res, tuple(tags))


def _accept(pairs, tol, label):
    bad = [p for p in pairs if not (p.residuals["cancellation"] <= tol and p.residuals["recurrence"] <= tol)]
    if bad:
        worst = max(max(p.residuals.values()) for p in bad)
        raise MissedRoots(f"{label}: {len(bad)} eigenpairs fail certification (worst residual {worst:.3g})",
                          found=len(pairs) - len(bad), expected=len(pairs))
    return pairs


def _sorted(pairs):
    return sorted(pairs, key=lambda p: (round(p.E.real, 12), round(p.E.imag, 12)))


# clean Hatano-Nelson chain

def solve_hn_obc(model: ModelSpec, tol: float = SOLVER_TOL) -> SpectralResult:
    if model.kind is not Kind.HN or model.bc is not Boundary.OBC or model.impurity is not None:
        raise UnsupportedCombination("solve_hn_obc needs a clean open HN chain")
    N, tR = model.N, model.tR
    s = np.sqrt(complex(model.kernel_product))  # one branch for the whole call
    theta = np.pi / (N + 1)
    m = np.arange(1, N + 1)
    radius = gbz_radius(model)
    pairs = []
    for ell in range(1, N + 1):
        z1 = s * np.exp(1j * theta * ell)
        z2 = s * np.exp(-1j * theta * ell)
        if abs(z1 - z2) <= 1e-14 * abs(s):
            raise DegenerateKernel(f"z1 = z2 at ell={ell}")
        E = tR * (z1 + z2)
        psi = z1 ** (-m) - z2 ** (-m)
        pairs.append(_finish_pair(model, E, z1, z2, psi, ("bulk", _skin_tag(radius))))
    _accept(pairs, tol, "solve_hn_obc")
    return SpectralResult(model, _sorted(pairs), radius, tol=tol)


def solve_hn_pbc(model: ModelSpec, tol: float = SOLVER_TOL) -> SpectralResult:
    if model.kind is not Kind.HN or model.bc is not Boundary.PBC or model.impurity is not None:
        raise UnsupportedCombination("solve_hn_pbc needs a clean HN ring")
    N, tL, tR = model.N, model.tL, model.tR
    m = np.arange(1, N + 1)
    pairs = []
    for ell in range(N):
        z2 = np.exp(2j * np.pi * ell / N)
        z1 = (tL / tR) / z2
        E = tR * z2 + tL / z2
        psi = z2 ** (N - m)  # z2**(-m) scaled so that psi_N = 1
        pairs.append(_finish_pair(model, E, z1, z2, psi, ("bulk", "extended")))
    _accept(pairs, tol, "solve_hn_pbc")
    diag = {"boundary_zero": [complex(tL * p.psi[0] / (tR * p.psi[-1])) for p in pairs]}
    return SpectralResult(model, pairs, gbz_radius(model), tol=tol, diagnostics=diag)


# impurity chains: secular determinant in the symmetric functions of z1, z2

def _u_table(E: np.ndarray, model: ModelSpec, K: int) -> np.ndarray:
    """u_k = (z1**k - z2**k)/(z1 - z2) for k = 0..K, rows indexed by k.

    Built from z1 + z2 = E/tR and z1*z2 = tL/tR, so it stays finite when the
    two propagating factors coalesce.
    """
    s = E / model.tR
    p = model.tL / model.tR
    u = np.zeros((K + 1,) + E.shape, dtype=complex)
    if K >= 1:
        u[1] = 1.0
    for k in range(1, K):
        u[k + 1] = s * u[k] - p * u[k - 1]
    return u


def secular_function(model: ModelSpec):
    """Vectorized f(E) whose zeros are the impurity-chain eigenvalues.

    Normalized to be monic of degree N in E.
    """
    N, tL, tR, V = model.N, model.tL, model.tR, model.V
    norm = -tR ** (N - 1)
    if model.bc is Boundary.OBC:
        n1 = model.impurity.site

        def f(E):
            E = np.asarray(E, dtype=complex)
            u = _u_table(E, model, N + 1)
            F = tL * u[n1] * u[N - n1] - tR * u[n1 + 1] * u[N + 1 - n1] + V * u[n1] * u[N + 1 - n1]
            return norm * F
    else:
        p = tL / tR

        def f(E):
            E = np.asarray(E, dtype=complex)
            u = _u_table(E, model, N + 1)
            num1 = u[N]
            num2 = u[N - 1] + p ** (N - 1)
            numN = 1.0 + p * u[N - 1]
            return norm * (tR * numN + tL * num2 + (V - E) * num1)
    return f


def _impurity_psi(model: ModelSpec, E: complex) -> np.ndarray:
    N, tL, tR, V = model.N, model.tL, model.tR, model.V
    p = tL / tR
    u = _u_table(np.asarray(E, dtype=complex), model, N + 1)
    m = np.arange(1, N + 1)
    if model.bc is Boundary.PBC:
        # ring ansatz normalized by the impurity-site amplitude
        return u[N + 1 - m] + p ** (N + 1 - m) * u[m - 1]
    n1 = model.impurity.site
    # left: p**(n1-m) u_m ~ z1**-m - z2**-m ; right: u_{N+1-m} ~ z1**(N+1-m) - z2**(N+1-m)
    a = lambda k: p ** (n1 - k) * u[k]
    b = lambda k: u[N + 1 - k]
    M = np.array([[a(n1), -b(n1)],
                  [tR * a(n1 - 1) + (V - E) * a(n1), tL * b(n1 + 1)]], dtype=complex)
    cn = np.linalg.norm(M, axis=0)
    cn[cn == 0] = 1.0
    _, _, vh = np.linalg.svd(M / cn)
    alpha, beta = np.conj(vh[-1]) / cn
    return np.where(m <= n1, alpha * a(np.minimum(m, n1)), beta * b(np.maximum(m, n1)))


def _fd_derivative(f, E, h):
    return (-f(E + 2 * h) + 8 * f(E + h) - 8 * f(E - h) + f(E - 2 * h)) / (12 * h)


def _secular_roots(model: ModelSpec, f, seeds: np.ndarray, scale: float, tol: float, seed: int):
    """All N zeros of the monic secular function.

    Simultaneous Newton with mutual (Maehly) deflation from the clean
    spectrum; leftovers are hunted from a grid over the inflated hull.
    """
    N = model.N
    h = 1e-6 * scale

    def ratio(E):
        return f(E) / _fd_derivative(f, E, h)

    z, conv, _ = aberth(ratio, seeds, step_tol=1e-14, abs_scale=scale)
    z = _newton_polish(f, z, h)
    found = _dedupe([e for e in z if _certified(model, e, f, tol)], scale)
    if len(found) < N:
        rng = np.random.default_rng(seed)
        lo = seeds.real.min() - abs(model.V), seeds.real.max() + abs(model.V)
        li = seeds.imag.min() - abs(model.V), seeds.imag.max() + abs(model.V)
        gx, gy = np.meshgrid(np.linspace(*lo, 21), np.linspace(*li, 21))
        grid = (gx + 1j * gy).ravel() + 1e-7 * scale * rng.standard_normal(gx.size)
        for g in grid:
            if len(found) >= N:
                break
            e = _maehly_newton(f, g, np.array(found), h, scale)
            if e is not None and _certified(model, e, f, tol):
                found = _dedupe(found + [e], scale)
    if len(found) < N:
        raise MissedRoots(f"secular equation: {len(found)} of {N} eigenvalues certified",
                          found=len(found), expected=N)
    return np.array(found[:N])


def _newton_polish(f, z, h, steps=2):
    z = z.copy()
    for _ in range(steps):
        step = f(z) / _fd_derivative(f, z, h)
        cand = z - step
        better = np.isfinite(cand) & (np.abs(f(cand)) < np.abs(f(z)))
        z = np.where(better, cand, z)
    return z


def _maehly_newton(f, E, known, h, scale, maxiter=100):
    for _ in range(maxiter):
        fe = f(E)
        d = _fd_derivative(f, E, h)
        corr = np.sum(1.0 / (E - known)) if known.size else 0.0
        denom = d / fe - corr
        if not np.isfinite(denom) or denom == 0:
            return None
        step = 1.0 / denom
        E = E - step
        if abs(step) <= 1e-14 * scale:
            return complex(E)
    return None


def _dedupe(vals, scale):
    out = []
    for v in vals:
        if all(abs(v - w) >= 1e-8 * scale for w in out):
            out.append(complex(v))
    return out


def _certified(model, E, f, tol):
    if not np.isfinite(E):
        return False
    psi = _impurity_psi(model, E)
    if not np.all(np.isfinite(psi)) or np.max(np.abs(psi)) == 0:
        return False
    return recurrence_residual(model, E, normalize_max(psi)) <= tol


def _impurity_pair(model: ModelSpec, E) -> EigenPair:
    z1, z2 = kernel_roots(model, E)
    psi = _impurity_psi(model, E)
    tags = []
    if _off_circle(z1, z2, model.N):
        if abs(z1) < 1 < abs(z2):
            tags.append("impurity-bound")
        else:
            tags.append("edge")
    else:
        tags.append("bulk")
    tags.append(_skin_tag(float(np.sqrt(abs(z1 * z2)))) if "bulk" in tags
                else _skin_tag(float(min(abs(z1), abs(z2)))))
    return _finish_pair(model, E, z1, z2, psi, tags)


def _solve_impurity(model: ModelSpec, tol: float, seed: int) -> SpectralResult:
    clean = model.without_impurity()
    E0 = (solve_hn_obc(clean, tol) if model.bc is Boundary.OBC else solve_hn_pbc(clean, tol)).eigenvalues
    scale = float(abs(model.tL) + abs(model.tR) + abs(model.V))
    f = secular_function(model)
    Es = _secular_roots(model, f, E0 + 1e-9 * scale, scale, tol, seed)
    pairs = [_impurity_pair(model, E) for E in Es]
    _accept(pairs, tol, "impurity chain")
    return SpectralResult(model, _sorted(pairs), gbz_radius(model), tol=tol, seed=seed)


def solve_hn_impurity_obc(model: ModelSpec, tol: float = SOLVER_TOL, seed: int = 0) -> SpectralResult:
    if model.kind is not Kind.HN or model.bc is not Boundary.OBC or model.impurity is None:
        raise UnsupportedCombination("solve_hn_impurity_obc needs an open HN chain with an impurity")
    return _solve_impurity(model, tol, seed)


def solve_hn_impurity_pbc(model: ModelSpec, tol: float = SOLVER_TOL, seed: int = 0) -> SpectralResult:
    if model.kind is not Kind.HN or model.bc is not Boundary.PBC or model.impurity is None:
        raise UnsupportedCombination("solve_hn_impurity_pbc needs an HN ring with an impurity")
    return _solve_impurity(model, tol, seed)


# non-Hermitian SSH chain

def ssh_elimination_poly(model: ModelSpec) -> ComplexPoly:
    """Polynomial in w = z1/r (r = GBZ radius) whose roots give z1 = r*w.

    Clearing denominators in the open-chain condition with z2 = r**2/z1
    gives tL w^(2N+2) + tRp r w^(2N+1) - tRp r w - tL; the factors w = +1, -1
    are artifacts of the elimination.
    """
    N = model.N
    r = np.sqrt(complex(model.kernel_product))
    c = np.zeros(2 * N + 3, dtype=complex)
    c[0], c[1] = -model.tL, -model.tRp * r
    c[-1], c[-2] = model.tL, model.tRp * r
    return ComplexPoly(c)


def ssh_condition_residual(model: ModelSpec, z1, z2) -> float:
    """Relative residual of (tRp z1 + tL) z2^(N+1) = (tRp z2 + tL) z1^(N+1)."""
    n = model.N + 1
    a = (model.tRp * z1 + model.tL) * z2 ** n
    b = (model.tRp * z2 + model.tL) * z1 ** n
    den = (abs(model.tRp * z1) + abs(model.tL)) * abs(z2) ** n + (abs(model.tRp * z2) + abs(model.tL)) * abs(z1) ** n
    return float(abs(a - b) / den) if den > 0 else 0.0


def _small_factor(model: ModelSpec, z1, z2) -> complex:
    """tRp*z1 + tL for |z1| <= |z2|.

    Near an edge state this is tiny and the direct sum is pure rounding; the
    open-chain condition gives it as a product instead.
    """
    ratio = (z1 / z2) ** (model.N + 1)
    if abs(ratio) < 1e-2:
        return (model.tRp * z2 + model.tL) * ratio
    return model.tRp * z1 + model.tL


def _pair_reciprocals(w: np.ndarray) -> list:
    n = w.size
    cost = np.abs(w[:, None] * w[None, :] - 1.0)
    np.fill_diagonal(cost, np.inf)
    order = np.dstack(np.unravel_index(np.argsort(cost, axis=None), cost.shape))[0]
    used = np.zeros(n, dtype=bool)
    out = []
    for i, j in order:
        if i < j and not used[i] and not used[j]:
            used[i] = used[j] = True
            out.append((w[i], w[j]))
            if len(out) * 2 == n:
                break
    return out


def ssh_psi(model: ModelSpec, E, z1, z2) -> np.ndarray:
    N, tL, tRp = model.N, model.tL, model.tRp
    if abs(z1) > abs(z2):  # swapping only flips the overall sign
        z1, z2 = z2, z1
    m = np.arange(1, N + 1)
    psiA = (tRp * z2 + tL) * z2 ** (-m) - _small_factor(model, z1, z2) * z1 ** (-m)
    psiB = E * (z2 ** (-m) - z1 ** (-m))
    psi = np.empty(2 * N, dtype=complex)
    psi[0::2] = psiA
    psi[1::2] = psiB
    return psi


def _ssh_exact_circle(model: ModelSpec) -> bool:
    """True when the elimination polynomial has real coefficients up to a phase,
    so bulk roots sit exactly on |w| = 1."""
    a = model.tRp * np.sqrt(complex(model.kernel_product)) / model.tL
    return abs(a.imag) <= 1e-14 * abs(a)


def solve_ssh_obc(model: ModelSpec, tol: float = SOLVER_TOL, seed: int = 0) -> SpectralResult:
    if model.kind is not Kind.SSH or model.bc is not Boundary.OBC:
        raise UnsupportedCombination("solve_ssh_obc needs an open SSH chain")
    N = model.N
    tL, tR, tLp, tRp = model.tL, model.tR, model.tLp, model.tRp
    c = complex(model.kernel_product)
    r = np.sqrt(c)
    rs = roots(ssh_elimination_poly(model), seed=seed)
    w = rs.roots
    for target in (1.0, -1.0):
        w = np.delete(w, int(np.argmin(np.abs(w - target))))
    exact = _ssh_exact_circle(model)
    pairs, rejected = [], 0
    for wa, wb in _pair_reciprocals(w):
        if abs(wa) > abs(wb):
            wa, wb = wb, wa
        z1 = r * wa
        z2 = c / z1
        if abs(z1 - z2) <= 1e-10 * abs(r):
            raise DegenerateKernel(f"z1 = z2 = {z1} in the SSH chain")
        if ssh_condition_residual(model, z1, z2) > tol:
            rejected += 1
            continue
        # kernel at z1: (tR z1 + tLp)(tRp z1 + tL) = E^2 z1
        E2 = (tR * z1 + tLp) * _small_factor(model, z1, z2) / z1
        off = abs(abs(wa) - 1) > 1e-8 if exact else _off_circle(z1, z2, N)
        tags = ("edge" if off else "bulk", _skin_tag(abs(r)))
        for E in (np.sqrt(E2), -np.sqrt(E2)):
            psi = ssh_psi(model, E, z1, z2)
            pair = _finish_pair(model, E, z1, z2, psi, tags)
            if pair.residuals["recurrence"] > tol:
                rejected += 1
                continue
            pairs.append(pair)
    if len(pairs) < 2 * N:
        raise MissedRoots(f"SSH chain: {len(pairs)} of {2 * N} eigenpairs certified "
                          f"({rejected} candidates rejected)", found=len(pairs), expected=2 * N)
    _accept(pairs, tol, "solve_ssh_obc")
    edge_tl = -tL / tRp
    pairs = _sorted(pairs)
    diag = {"root_residual": rs.residual, "edge_zero": complex(edge_tl)}
    diag["edge_zero_distance"] = [float(min(abs(p.z1 - edge_tl), abs(p.z2 - edge_tl))) for p in pairs]
    return SpectralResult(model, pairs, gbz_radius(model), tol=tol, seed=seed, diagnostics=diag)


def solve(model: ModelSpec, tol: float = SOLVER_TOL, seed: int = 0, pairing: bool = False) -> SpectralResult:
    """Dispatch to the solver matching the model's kind, boundary and impurity."""
    if model.kind is Kind.SSH:
        res = solve_ssh_obc(model, tol, seed)
    elif model.impurity is not None:
        res = (solve_hn_impurity_obc if model.bc is Boundary.OBC else solve_hn_impurity_pbc)(model, tol, seed)
    else:
        res = (solve_hn_obc if model.bc is Boundary.OBC else solve_hn_pbc)(model, tol)
    res.seed = seed
    if pairing:
        res.pairing = [dict(state=i, **row) for i, p in enumerate(res.pairs)
                       for row in verify_cancellation(model, p, seed=seed)["pairing"]]
    return res


def verify_cancellation(model: ModelSpec, pair: EigenPair, seed: int = 0) -> dict:
    """Diagnostic: how well the kernel zeros at ``pair.E`` are cancelled by P.

    The kernel zeros are recomputed from ``pair.E`` so that a perturbed
    energy is judged honestly. Never raises on a bad pair.
    """
    E = complex(pair.E)
    psi = np.asarray(pair.psi, dtype=complex)
    amps = boundary_amplitudes(model, psi)
    P = numerator_P(model, E, amps)
    Ps = P if isinstance(P, tuple) else (P,)
    zq = np.array(kernel_roots(model, E))
    pz = []
    for k, Pk in enumerate(Ps):
        if Pk.degree >= 1:
            pz.extend((k, z) for z in roots(Pk, tol=1e-6, seed=seed).roots)
    rows = []
    resid = []
    for q in zq:
        r = max(float(backward_residual(Pk, q)) for Pk in Ps)
        resid.append(r)
        # nearest zero of each numerator; the worst of those is what must cancel
        best = None
        for k in range(len(Ps)):
            cand = [z for kk, z in pz if kk == k]
            if cand:
                zz = min(cand, key=lambda z: abs(z - q))
                if best is None or abs(zz - q) > abs(best - q):
                    best = zz
        rows.append({"q_zero": complex(q), "p_zero": None if best is None else complex(best),
                     "distance": float("inf") if best is None else float(abs(best - q))})
    return {"E": E, "residual": float(max(resid)), "residuals": resid, "pairing": rows,
            "q_zeros": zq, "p_zeros": [complex(z) for _, z in pz],
            "p_zero_owner": [("P_A", "P_B")[k] if len(Ps) == 2 else "P" for k, _ in pz]}
