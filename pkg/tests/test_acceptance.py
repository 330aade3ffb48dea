"""Acceptance suite: one printed PASS/FAIL line per criterion, 1 through 10.

Run with ``pytest tests/test_acceptance.py -v``; the report lines appear in
the output even without ``-s``.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gflattice.errors import ContourHitsZero
from gflattice.genfunc import RationalGF, coefficients, rescale, shift_tail
from gflattice.infinite import residual_table
from gflattice.models import ModelSpec, boundary_amplitudes, kernel_Q, numerator_P
from gflattice.oracle import compare, oracle_eigenvector, overlap
from gflattice.poly import ComplexPoly
from gflattice.solvers import cancellation_residual, solve
from gflattice.sweeps import impurity_sweep
from gflattice.topology import winding_nuA, winding_W

from conftest import FAMILIES, random_model


@pytest.fixture
def report(capsys):
    def emit(n, checks):
        ok = all(v for _, v in checks)
        detail = "; ".join(f"{name}={'ok' if v else 'FAIL'}" for name, v in checks)
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok
    return emit


def test_criterion_01_hn_obc_closed_form(report):
    res = solve(ModelSpec.hn(1, 0.6, 20))
    ref = 2 * np.sqrt(0.6) * np.cos(np.arange(1, 21) * np.pi / 21)
    dE = np.max(np.abs(np.sort_complex(res.eigenvalues) - np.sort(ref)))
    dz = max(max(abs(abs(p.z1) - np.sqrt(5 / 3)), abs(abs(p.z2) - np.sqrt(5 / 3))) for p in res.pairs)
    assert report(1, [(f"eigenvalues dE={dE:.1e}", dE <= 1e-10), (f"|z| gap={dz:.1e}", dz <= 1e-10)])


def test_criterion_02_oracle_equivalence(report):
    rng = np.random.default_rng(2)
    worst_dE, worst_ov, count = 0.0, 1.0, 0
    for k in range(200):
        m = random_model(rng, FAMILIES[k % len(FAMILIES)], phases=bool(k % 2))
        c = compare(solve(m, seed=k), seed=k)
        worst_dE = max(worst_dE, c.rel_dE)
        worst_ov = min(worst_ov, c.min_overlap)
        count += 1
    assert report(2, [(f"{count} configs rel dE={worst_dE:.1e}", worst_dE <= 1e-7),
                      (f"min overlap 1-{1 - worst_ov:.1e}", worst_ov >= 1 - 1e-8)])


def test_criterion_03_cancellation(report):
    rng = np.random.default_rng(3)
    worst_ok, weakest_bad, pairs = 0.0, np.inf, 0
    for k in range(50):
        m = random_model(rng, FAMILIES[k % len(FAMILIES)], N=int(rng.integers(3, 41)))
        for p in solve(m, seed=k).pairs:
            worst_ok = max(worst_ok, cancellation_residual(m, p.E, p.psi))
            weakest_bad = min(weakest_bad, cancellation_residual(m, p.E + 1e-3, p.psi))
            pairs += 1
    assert report(3, [(f"{pairs} pairs residual={worst_ok:.1e}", worst_ok <= 1e-8),
                      (f"perturbed residual>={weakest_bad:.1e}", weakest_bad > 1e-4)])


def test_criterion_04_pbc_spectrum(report):
    res = solve(ModelSpec.hn(1, 0.6, 30, "pbc"))
    # distance to the ellipse via the angle of the matching propagating factor
    theta = np.angle([p.z2 for p in res.pairs])
    ell = np.max(np.abs(res.eigenvalues - (0.6 * np.exp(1j * theta) + np.exp(-1j * theta))))
    dz = max(abs(abs(p.z2) - 1) for p in res.pairs)
    assert report(4, [(f"ellipse gap={ell:.1e}", ell <= 1e-9), (f"|z2|-1={dz:.1e}", dz <= 1e-10)])


def test_criterion_05_impurity_sweep(report):
    base = ModelSpec.hn(1, 0.6, 20, V=0.0, site=10)
    Vs = [0.2498, 0.3, 0.35, 0.4, 0.45, 0.5, 0.5711]
    rows, results = impurity_sweep(base, Vs)
    first, last = rows[0], rows[-1]
    z1 = [r.z1_abs for r in rows]
    overlaps = []
    for r, res in ((first, results[0]), (last, results[-1])):
        pair = res.pairs[r.state]
        overlaps.append(overlap(pair.psi, oracle_eigenvector(res.model, pair.E)))
    checks = [
        (f"V=0.2498 argmax={first.argmax_site}<=3", first.argmax_site <= 3),
        (f"V=0.5711 argmax={last.argmax_site}==10", last.argmax_site == 10),
        (f"|z1| {z1[0]:.4f}->{z1[-1]:.4f} crosses 1", z1[0] > 1 > z1[-1]),
        ("|z2|>1 throughout", all(r.z2_abs > 1 for r in rows)),
        (f"overlap 1-{1 - min(overlaps):.1e}", min(overlaps) >= 1 - 1e-6),
    ]
    assert report(5, checks)


def test_criterion_06_ssh_topology(report):
    topo = ModelSpec.ssh_family(0.9, 20)
    res = solve(topo)
    edge = [p for p in res.pairs if "edge" in p.tags]
    dz = min((abs(p.z1 + 1.125) for p in edge), default=np.inf)
    Ns = np.arange(20, 41, 4)
    mags = []
    for N in Ns:
        e = [abs(p.E) for p in solve(ModelSpec.ssh_family(0.9, int(N))).pairs if "edge" in p.tags]
        mags.append(min(e) if e else np.nan)
    slope = np.polyfit(Ns, np.log(mags), 1)[0] if np.all(np.isfinite(mags)) else np.nan
    triv = ModelSpec.ssh_family(1.2, 60)
    tres = solve(triv)
    bulk = max(max(abs(abs(p.z1) - 1.25), abs(abs(p.z2) - 1.25)) for p in tres.pairs)
    chiral = max(np.max(np.min(np.abs(r.eigenvalues[:, None] + r.eigenvalues[None, :]), axis=1))
                 for r in (res, tres))
    checks = [
        ("nu_A(0.9)=1", winding_nuA(topo).value == 1),
        (f"edge pair count={len(edge)}", len(edge) == 2),
        (f"|z1+1.125|={dz:.1e}", dz <= 1e-6),
        (f"log|E_edge| slope={slope:.3f}", slope < 0),
        ("nu_A(1.2)=0", winding_nuA(triv).value == 0),
        ("no edge at 1.2", not any("edge" in p.tags for p in tres.pairs)),
        (f"bulk |z|-1.25={bulk:.1e}", bulk <= 0.05),
        (f"chiral gap={chiral:.1e}", chiral <= 1e-9),
    ]
    assert report(6, checks)


def test_criterion_07_winding(report):
    rng = np.random.default_rng(7)
    agree, tried = 0, 0
    while tried < 1000:
        tL, tR = (rng.uniform(0.3, 2) * np.exp(1j * rng.uniform(-np.pi, np.pi)) for _ in range(2))
        E = complex(rng.normal(scale=2), rng.normal(scale=2))
        try:
            rep = winding_W(ModelSpec.hn(tL, tR, 5), E, radius=float(rng.uniform(0.5, 2)))
        except ContourHitsZero:
            continue
        tried += 1
        agree += rep.value == rep.count
    left_m, right_m = ModelSpec.hn(1, 0.6, 20), ModelSpec.hn(0.6, 1, 20)
    left, right = winding_W(left_m, 0).value, winding_W(right_m, 0).value
    tags_ok = (all("skin-left" in p.tags for p in solve(left_m).pairs)
               and all("skin-right" in p.tags for p in solve(right_m).pairs))
    assert report(7, [(f"{agree}/{tried} draws agree", agree == tried), (f"W={left}", left == 1),
                      (f"swapped W={right}", right == -1), ("skin tags match", tags_ok)])


coef = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


@st.composite
def rational(draw):
    zq = draw(st.lists(st.complex_numbers(min_magnitude=0.8, max_magnitude=1.5), min_size=1, max_size=3))
    P = draw(st.lists(coef, min_size=1, max_size=4))
    return RationalGF(ComplexPoly(P), ComplexPoly.from_roots(zq))


_roundtrip_worst = [0.0, 0]


@settings(max_examples=100, deadline=None, derandomize=True)
@given(rational(), st.integers(1, 5), st.complex_numbers(max_magnitude=1.0))
def _roundtrips(g, h, lam):
    b = coefficients(g, 40).coeffs
    ref = max(1.0, np.max(np.abs(b)))
    tail = coefficients(shift_tail(g, h, b[:h]), 40 - h).coeffs
    e1 = np.max(np.abs(np.concatenate([b[:h], tail]) - b)) / ref
    e2 = np.max(np.abs(coefficients(rescale(rescale(g, lam), -lam), 40).coeffs - b)) / ref
    _roundtrip_worst[0] = max(_roundtrip_worst[0], e1, e2)
    _roundtrip_worst[1] += 1


def test_criterion_08_corollaries(report):
    _roundtrips()
    worst, n = _roundtrip_worst
    tL, tR = 1.0, 0.6
    m = ModelSpec.hn(tL, tR, 20)
    lam = 0.5 * np.log(tL / tR)
    gap = 0.0
    for p in solve(m).pairs:
        g = RationalGF(numerator_P(m, p.E, boundary_amplitudes(m, p.psi)), kernel_Q(m, p.E), m.N)
        zq = rescale(g, lam).Q.roots().roots
        gap = max(gap, float(np.max(np.abs(np.abs(zq) - 1))))
    assert report(8, [(f"{n} round trips err={worst:.1e}", n >= 100 and worst <= 1e-12),
                      (f"rescaled Q-zeros off unit circle by {gap:.2e}", gap <= 1e-9)])


def test_criterion_09_fibonacci(report):
    fib = RationalGF(ComplexPoly([0, 1]), ComplexPoly([1, -1, -1]))
    b = coefficients(fib, 70).coeffs
    exact = [0, 1]
    for _ in range(69):
        exact.append(exact[-1] + exact[-2])
    ints = [int(round(x.real)) for x in b[:21]]
    z = np.sort(fib.Q.roots().roots.real)  # z = (-1 -+ sqrt 5)/2
    m = np.arange(71)
    # partial fractions: b_m = -sum_i P(z_i)/Q'(z_i) z_i^{-m-1} with P(z) = z
    closed = sum(-zi / (-1 - 2 * zi) * zi ** (-m - 1.0) for zi in z)
    rel = np.max(np.abs(closed - np.array(exact, dtype=float)) / np.maximum(1, exact))
    assert report(9, [("b10=55", ints[10] == 55), ("b20=6765", ints[20] == 6765),
                      ("integer recurrence", ints == exact[:21]),
                      (f"closed form rel err={rel:.1e}", rel <= 1e-9)])


def test_criterion_10_plane_wave_residual(report):
    t, k, kk = 1.0, 0.7, (0.7, 1.9)
    one = residual_table(k, t, 2 * t * np.cos(k))
    two = residual_table(kk, t, 2 * t * (np.cos(kk[0]) + np.cos(kk[1])), dim=2)
    mono = all(np.all(np.diff([v for _, v in tab]) < 0) for tab in (one, two))
    assert report(10, [(f"1D={one[-1][1]:.2e}", one[-1][1] <= 0.01 * abs(t)),
                       (f"2D={two[-1][1]:.2e}", two[-1][1] <= 0.02 * abs(t)), ("monotone in rho", mono)])
