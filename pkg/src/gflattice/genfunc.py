"""Rational generating functions G(z) = P(z)/Q(z) and their series coefficients.

The coefficients of the Taylor expansion at z = 0 are the site amplitudes of
a lattice state. They are always extracted by long division (a linear
recurrence driven by Q), never through the roots of Q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import NotDivisible, SingularAtOrigin
from .poly import DEFAULT_TOL, ComplexPoly, backward_residual, roots


@dataclass(frozen=True)
class SeriesWindow:
    coeffs: np.ndarray
    start: int = 0

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, m):
        return self.coeffs[m - self.start]


@dataclass(frozen=True)
class RationalGF:
    P: ComplexPoly
    Q: ComplexPoly
    N: Optional[int] = None
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, z):
        return self.P(z) / self.Q(z)

    def coefficients(self, m_max: int) -> SeriesWindow:
        return coefficients(self, m_max)

    def window(self) -> np.ndarray:
        """Amplitudes b_1..b_N of a finite chain."""
        if self.N is None:
            raise ValueError("window() needs a chain length N")
        return coefficients(self, self.N).coeffs[1:]


def series(P: ComplexPoly, Q: ComplexPoly, m_max: int) -> np.ndarray:
    q = Q.coeffs
    if Q.is_zero() or q[0] == 0:
        raise SingularAtOrigin("Q(0) = 0: no Taylor expansion at the origin")
    p = P.coeffs
    dq = q.size - 1
    b = np.zeros(m_max + 1, dtype=complex)
    for m in range(m_max + 1):
        acc = p[m] if m < p.size else 0.0
        j = min(m, dq)
        if j:
            acc = acc - np.dot(q[1 : j + 1], b[m - j : m][::-1])
        b[m] = acc / q[0]
    return b


def coefficients(g: RationalGF, m_max: int) -> SeriesWindow:
    """b_0..b_{m_max} of the expansion of P/Q at the origin."""
    return SeriesWindow(series(g.P, g.Q, m_max), 0)


def shift_tail(g: RationalGF, h: int, head: Sequence[complex], tol: float = DEFAULT_TOL) -> RationalGF:
    """Rational form of sum_m b_{m+h} z^m = (G - b_0 - ... - b_{h-1} z^{h-1}) / z^h."""
    if h <= 0:
        raise ValueError("h must be positive")
    if len(head) != h:
        raise ValueError(f"head must hold exactly h={h} values")
    H = ComplexPoly(head)
    QH = g.Q * H
    num = g.P - QH
    c = num.coeffs
    low = c[:h]
    scale = max(np.max(np.abs(g.P.coeffs), initial=0.0), np.max(np.abs(QH.coeffs), initial=0.0))
    if low.size and np.max(np.abs(low)) > tol * max(scale, np.finfo(float).tiny):
        raise NotDivisible(f"numerator minus head is not divisible by z^{h} "
                           f"(residual {np.max(np.abs(low)):.3g}); inconsistent head values")
    N = None if g.N is None else g.N - h
    return RationalGF(ComplexPoly(c[h:]), g.Q, N, g.label, dict(g.meta))


def rescale(g: RationalGF, lam: complex) -> RationalGF:
    """(P(e^{-lam} z), Q(e^{-lam} z)): coefficients become e^{-lam m} b_m and
    every common zero moves by a factor e^{lam}."""
    s = np.exp(-lam)
    return RationalGF(g.P.compose_scale(s), g.Q.compose_scale(s), g.N, g.label, dict(g.meta))


def euler_operator(g: RationalGF, p_coeffs: Sequence[complex]) -> RationalGF:
    """p(z d/dz) applied to P/Q, returned as a rational function over Q^(deg p + 1)."""
    p_coeffs = list(p_coeffs)
    d = len(p_coeffs) - 1
    Q = g.Q
    dQ = Q.derivative()
    z = ComplexPoly.monomial(1)
    terms = [g.P]
    for j in range(d):
        Nj = terms[-1]
        terms.append(z * (Nj.derivative() * Q - Nj * dQ * (j + 1)))
    num = ComplexPoly([])
    for j, pj in enumerate(p_coeffs):
        if pj != 0:
            num = num + terms[j] * (Q ** (d - j)) * pj
    return RationalGF(num, Q ** (d + 1), g.N, g.label)


def apply_poly_weight(g: RationalGF, p_coeffs: Sequence[complex], m_max: int) -> SeriesWindow:
    """Window of p(m) * b_m, computed from the rational form of p(zD) G."""
    return coefficients(euler_operator(g, p_coeffs), m_max)


def reflection_check(g: RationalGF, sign: int, tol: float = 1e-9) -> tuple[bool, float]:
    """Test b_n == sign * b_{N+1-n} for n = 1..N, i.e. G(z) = sign z^{N+1} G(1/z).

    Returns ``(holds, max_deviation)`` with the deviation relative to max|b|.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    b = g.window()
    ref = np.max(np.abs(b))
    dev = float(np.max(np.abs(b - sign * b[::-1])) / ref) if ref > 0 else 0.0
    return dev <= tol, dev


def reflect(g: RationalGF) -> RationalGF:
    """Generating function of the reversed window, z^{N+1} G(1/z)."""
    if g.N is None:
        raise ValueError("reflect() needs a chain length N")
    shift = g.N + 1 + g.Q.degree - g.P.degree
    if shift < 0:
        raise ValueError("numerator degree too high for a finite reflection")
    return RationalGF(g.P.reversed().shift_degree(shift), g.Q.reversed(), g.N, g.label + ":reflected")


def pole_residuals(g: RationalGF, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Zeros of Q and the backward residual |P(z)|/sum|p_k||z|^k at each."""
    zq = roots(g.Q, tol=tol).roots
    return zq, np.atleast_1d(backward_residual(g.P, zq))


def is_finite_polynomial(g: RationalGF, tol: float = 1e-8) -> bool:
    """Every zero of Q is (numerically) a zero of P, so P/Q has no poles."""
    _, res = pole_residuals(g)
    return bool(np.all(res <= tol))
