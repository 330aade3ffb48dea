"""Dense complex polynomials and simultaneous (Aberth-Ehrlich) root finding.

Coefficients are stored in ascending order: ``coeffs[m]`` multiplies ``z**m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegreeOverflow, NonConvergence

EPS = np.finfo(float).eps
DEFAULT_TOL = 1e-10
MAX_DEGREE = 100_000
ABERTH_MAXITER = 200


class ComplexPoly:
    """Immutable polynomial with complex coefficients.

    The zero polynomial has ``degree == -1``. Trailing exact zeros are trimmed
    on construction so that ``coeffs[degree] != 0`` otherwise.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs, max_degree: int = MAX_DEGREE):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        if c.size - 1 > max_degree:
            raise DegreeOverflow(f"degree {c.size - 1} exceeds max_degree={max_degree}")
        c.flags.writeable = False
        self._c = c

    # construction helpers
    @classmethod
    def monomial(cls, k: int, coeff: complex = 1.0) -> "ComplexPoly":
        c = np.zeros(k + 1, dtype=complex)
        c[k] = coeff
        return cls(c)

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lead: complex = 1.0) -> "ComplexPoly":
        c = np.array([lead], dtype=complex)
        for r in _leja_order(np.asarray(roots, dtype=complex)):
            c = np.concatenate([[0], c]) - r * np.concatenate([c, [0]])
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return self._c.size - 1

    def is_zero(self) -> bool:
        return self._c.size == 0

    def __len__(self):
        return self._c.size

    def __call__(self, z):
        return horner(self._c, z)

    def __repr__(self):
        return f"ComplexPoly({self._c.tolist()!r})"

    # arithmetic
    def _coerce(self, other) -> "ComplexPoly":
        if isinstance(other, ComplexPoly):
            return other
        return ComplexPoly([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(self._c.size, other._c.size)
        out = np.zeros(n, dtype=complex)
        out[: self._c.size] += self._c
        out[: other._c.size] += other._c
        return ComplexPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ComplexPoly(-self._c)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, ComplexPoly):
            return self.scale(other)
        if self.is_zero() or other.is_zero():
            return ComplexPoly([])
        if self.degree + other.degree > MAX_DEGREE:
            raise DegreeOverflow(f"product degree {self.degree + other.degree} exceeds {MAX_DEGREE}")
        return ComplexPoly(np.convolve(self._c, other._c))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = ComplexPoly([1.0])
        for _ in range(k):
            out = out * self
        return out

    def scale(self, s: complex) -> "ComplexPoly":
        return ComplexPoly(self._c * s)

    def shift_degree(self, k: int) -> "ComplexPoly":
        """Multiply by ``z**k``."""
        return ComplexPoly(np.concatenate([np.zeros(k, dtype=complex), self._c]))

    def compose_scale(self, s: complex) -> "ComplexPoly":
        """Return ``p(s*z)``."""
        return ComplexPoly(self._c * s ** np.arange(self._c.size))

    def derivative(self) -> "ComplexPoly":
        if self.degree < 1:
            return ComplexPoly([])
        return ComplexPoly(self._c[1:] * np.arange(1, self._c.size))

    def reversed(self) -> "ComplexPoly":
        """``z**degree * p(1/z)``."""
        return ComplexPoly(self._c[::-1])

    def deflate(self, root: complex, tol: float = DEFAULT_TOL) -> "ComplexPoly":
        """Synthetic division by ``(z - root)``.

        Forward recursion for ``|root| <= 1``, backward otherwise, so that the
        recurrence never amplifies rounding errors.
        """
        if self.degree < 1:
            raise ValueError("cannot deflate a constant polynomial")
        if relative_residual(self, root) > tol:
            raise ValueError(f"{root!r} is not a root within tol={tol:g}")
        a = self._c
        n = self.degree
        b = np.zeros(n, dtype=complex)
        if abs(root) <= 1:
            b[n - 1] = a[n]
            for k in range(n - 1, 0, -1):
                b[k - 1] = a[k] + root * b[k]
        else:
            b[0] = -a[0] / root
            for k in range(1, n):
                b[k] = (b[k - 1] - a[k]) / root
        return ComplexPoly(b)

    def roots(self, tol: float = DEFAULT_TOL, seed: int = 0) -> "RootSet":
        return roots(self, tol=tol, seed=seed)

    def allclose(self, other: "ComplexPoly", atol: float = 1e-12) -> bool:
        n = max(len(self), len(other))
        a = np.zeros(n, complex)
        b = np.zeros(n, complex)
        a[: len(self)] = self._c
        b[: len(other)] = other._c
        return bool(np.all(np.abs(a - b) <= atol))


def _leja_order(r: np.ndarray) -> np.ndarray:
    """Leja ordering keeps intermediate products of ``(z - r_k)`` well scaled."""
    if r.size < 3:
        return r
    rest = list(range(r.size))
    first = int(np.argmax(np.abs(r)))
    order = [first]
    rest.remove(first)
    logprod = np.log(np.abs(r - r[first]) + 1e-300)
    while rest:
        k = max(rest, key=lambda i: logprod[i])
        order.append(k)
        rest.remove(k)
        logprod = logprod + np.log(np.abs(r - r[k]) + 1e-300)
    return r[order]


def horner(coeffs: np.ndarray, z):
    z = np.asarray(z, dtype=complex)
    p = np.zeros_like(z)
    for a in coeffs[::-1]:
        p = p * z + a
    return p if p.ndim else complex(p)


def evaluate(p: ComplexPoly, z):
    return p(z)


def evaluation_scale(p: ComplexPoly, z):
    """``sum |a_k| |z|**k``: the natural magnitude of terms summed in ``p(z)``."""
    return horner(np.abs(p.coeffs).astype(complex), np.abs(np.asarray(z, dtype=complex))).real


def backward_residual(p: ComplexPoly, z):
    """``|p(z)| / sum |a_k||z|**k``; zero at exact roots, at most 1."""
    s = evaluation_scale(p, z)
    return np.where(s > 0, np.abs(p(z)) / np.where(s > 0, s, 1.0), 0.0)


def relative_residual(p: ComplexPoly, z) -> float:
    """``|p(z)| / (max|coeff| * max(1, |z|)**degree)``."""
    if p.is_zero():
        return 0.0
    scale = np.max(np.abs(p.coeffs)) * max(1.0, abs(z)) ** p.degree
    return float(abs(p(z)) / scale)


@dataclass(frozen=True)
class RootSet:
    """All roots of a polynomial, with clustering into multiplicities.

    ``roots`` lists every root individually (its length equals the degree);
    ``clusters`` groups roots closer than ``10*sqrt(tol)`` (relative) as
    ``(center, multiplicity)``.
    """

    roots: np.ndarray
    clusters: list = field(default_factory=list)
    residual: float = 0.0
    tol: float = DEFAULT_TOL
    iterations: int = 0
    seed: int = 0

    def __len__(self):
        return self.roots.size

    def __iter__(self):
        return iter(self.roots)


def _newton_ratio_poly(c: np.ndarray):
    """Vectorised ``p/p'`` plus a mask of points where ``p`` is at rounding level.

    Uses the reversed polynomial for ``|z| > 1`` to stay clear of overflow.
    """
    n = c.size - 1
    ac = np.abs(c)
    cr = c[::-1]
    acr = ac[::-1]

    def ev(coeffs, acoeffs, z):
        p = np.full(z.shape, coeffs[-1], dtype=complex)
        dp = np.zeros(z.shape, dtype=complex)
        bound = np.full(z.shape, acoeffs[-1])
        az = np.abs(z)
        for a, aa in zip(coeffs[-2::-1], acoeffs[-2::-1]):
            dp = dp * z + p
            p = p * z + a
            bound = bound * az + aa
        return p, dp, bound

    def ratio(z):
        z = np.asarray(z, dtype=complex)
        out = np.empty_like(z)
        floor = np.zeros(z.shape, dtype=bool)
        inner = np.abs(z) <= 1
        if inner.any():
            zi = z[inner]
            p, dp, b = ev(c, ac, zi)
            with np.errstate(divide="ignore", invalid="ignore"):
                out[inner] = p / dp
            floor[inner] = np.abs(p) <= 4 * n * EPS * b
        if (~inner).any():
            zo = z[~inner]
            w = 1.0 / zo
            q, dq, b = ev(cr, acr, w)
            with np.errstate(divide="ignore", invalid="ignore"):
                out[~inner] = zo / (n - w * dq / q)
            floor[~inner] = np.abs(q) <= 4 * n * EPS * b
        return out, floor

    return ratio


def _initial_guesses(c: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Circles from the upper convex hull of ``(k, log|a_k|)`` (Newton polygon)."""
    n = c.size - 1
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(c))
    hull: list[int] = []
    for k in range(n + 1):
        if not np.isfinite(la[k]):
            continue
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            if (la[j] - la[i]) * (k - i) <= (la[k] - la[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    sigma = rng.uniform(0, 2 * np.pi)
    out = []
    for i, j in zip(hull[:-1], hull[1:]):
        m = j - i
        u = np.exp((la[i] - la[j]) / m)
        ang = 2 * np.pi * np.arange(m) / m + 2 * np.pi * i / n + sigma
        out.append(u * np.exp(1j * ang))
    z = np.concatenate(out)
    return z * (1 + 1e-3 * rng.standard_normal(z.size))


def aberth(
    newton_ratio: Callable,
    z0: np.ndarray,
    *,
    maxiter: int = ABERTH_MAXITER,
    step_tol: float = 4 * EPS,
    abs_scale: float = 0.0,
):
    """Aberth-Ehrlich simultaneous iteration.

    ``newton_ratio(z)`` returns ``f(z)/f'(z)`` for an array of points, or a
    pair ``(ratio, done)`` where ``done`` flags points already at the noise
    floor of ``f``. ``f`` must have exactly ``len(z0)`` zeros. Returns the
    approximations, a per-root convergence mask and the iteration count.
    """
    z = np.array(z0, dtype=complex)
    n = z.size
    active = np.ones(n, dtype=bool)
    it = 0
    for it in range(1, maxiter + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        res = newton_ratio(z[idx])
        if isinstance(res, tuple):
            r, done = res
        else:
            r, done = res, np.zeros(idx.size, dtype=bool)
        d = z[idx, None] - z[None, :]
        d[np.arange(idx.size), idx] = np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.sum(1.0 / d, axis=1)
            w = r / (1.0 - r * s)
            bad = ~np.isfinite(w)
            if bad.any():
                w[bad] = np.where(np.isfinite(s[bad]) & (s[bad] != 0), -1.0 / s[bad], 1e-3)
        w = np.where(done, 0.0, w)
        z[idx] -= w
        conv = done | (np.abs(w) <= step_tol * np.maximum(np.abs(z[idx]), abs_scale))
        active[idx[conv]] = False
    return z, ~active, it


def _cluster(roots: np.ndarray, tol: float) -> list:
    n = roots.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    thr = 10 * np.sqrt(tol)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= thr * max(1.0, abs(roots[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [(complex(np.mean(roots[g])), len(g)) for g in sorted(groups.values(), key=lambda g: g[0])]


def _sort_key(r):
    return (round(r.real, 12), round(r.imag, 12))


def roots(p: ComplexPoly, tol: float = DEFAULT_TOL, seed: int = 0, maxiter: int = ABERTH_MAXITER,
          restarts: int = 3) -> RootSet:
    """All complex roots of ``p`` by Aberth-Ehrlich iteration with Newton polish.

    Each root satisfies ``|p(r)| / (max|a| * max(1,|r|)**deg) <= tol``;
    otherwise the iteration is restarted from a jittered initial set, and
    :class:`NonConvergence` is raised once ``restarts`` are exhausted.
    """
    if p.degree < 1:
        raise ValueError("roots() needs degree >= 1")
    c = p.coeffs
    lead = abs(c[-1])
    if lead < np.finfo(float).tiny:
        raise ValueError("leading coefficient underflows")
    nzero = int(np.flatnonzero(c)[0])
    core = c[nzero:]
    n = core.size - 1
    rng = np.random.default_rng(seed)
    total_it = 0
    z = np.zeros(0, dtype=complex)
    res = np.zeros(0)
    if n == 1:
        z = np.array([-core[0] / core[1]])
    elif n > 1:
        ratio = _newton_ratio_poly(core)
        for attempt in range(restarts + 1):
            z0 = _initial_guesses(core, rng)
            if attempt:
                z0 = z0 * np.exp(1j * rng.uniform(0, 2 * np.pi)) * (1 + 0.05 * rng.standard_normal(n))
            z, _, it = aberth(ratio, z0, maxiter=maxiter)
            total_it += it
            z = _polish(core, z)
            res = np.array([relative_residual(p, zi) for zi in z])
            if np.all(res <= tol) and np.all(np.isfinite(z)):
                break
        else:
            raise NonConvergence(f"Aberth iteration failed after {restarts + 1} attempts "
                                 f"(max residual {np.nanmax(res):.3g})", roots=z, residuals=res)
    allr = np.concatenate([np.zeros(nzero, dtype=complex), z])
    allr = np.array(sorted(allr, key=_sort_key), dtype=complex)
    resid = max((relative_residual(p, r) for r in allr), default=0.0)
    return RootSet(roots=allr, clusters=_cluster(allr, tol), residual=resid, tol=tol,
                   iterations=total_it, seed=seed)


def _polish(c: np.ndarray, z: np.ndarray, steps: int = 2) -> np.ndarray:
    """Plain Newton steps, kept only when they shrink |p| and stay local."""
    ratio = _newton_ratio_poly(c)
    z = z.copy()
    for _ in range(steps):
        r, _ = ratio(z)
        cand = z - r
        d = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(d, np.inf)
        near = d.min(axis=1) if z.size > 1 else np.full(z.size, np.inf)
        ok = np.isfinite(cand) & (np.abs(r) < 0.1 * near)
        better = np.abs(horner(c, cand)) <= np.abs(horner(c, z))
        z = np.where(ok & better, cand, z)
    return z
