from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gflattice.errors import ConfigError, UnsupportedCombination
from gflattice.genfunc import RationalGF
from gflattice.models import (BoundaryAmplitudes, ModelSpec, apply_hamiltonian, boundary_amplitudes, dense_matrix,
                              kernel_Q, kernel_roots, numerator_P)
from gflattice.poly import ComplexPoly

from conftest import FAMILIES, random_model


def test_kernel_examples():
    q = kernel_Q(ModelSpec.hn(1, 1, 4), 0)
    assert q.allclose(ComplexPoly([1, 0, 1]))
    assert np.allclose(sorted(kernel_roots(ModelSpec.hn(1, 1, 4), 0), key=lambda z: z.imag), [-1j, 1j])
    for E in (0.3, 1.7 - 0.4j, -2.2j):
        z1, z2 = kernel_roots(ModelSpec.hn(1, 0.6, 4), E)
        assert abs(z1 * z2 - 5 / 3) < 1e-14
        z1, z2 = kernel_roots(ModelSpec.ssh(1.125, 0.72, 1, 1, 4), E)
        assert abs(z1 * z2 - 1.5625) < 1e-14


def test_kernel_roots_are_roots_and_ordered(rng):
    for _ in range(50):
        m = random_model(rng, "ssh-obc" if rng.random() < 0.5 else "hn-obc", N=5)
        E = complex(rng.normal(), rng.normal())
        q = kernel_Q(m, E)
        z1, z2 = kernel_roots(m, E)
        assert abs(z1) <= abs(z2)
        for z in (z1, z2):
            assert abs(q(z)) <= 1e-12 * np.sum(np.abs(q.coeffs) * abs(z) ** np.arange(3))


def test_numerator_examples():
    m = ModelSpec.hn(1, 1, 3)
    assert numerator_P(m, 0.0, BoundaryAmplitudes(1, 1)).allclose(ComplexPoly([0, 1, 0, 0, 0, 1]))
    pbc = ModelSpec.hn(1, 0.6, 4, "pbc")
    P = numerator_P(pbc, 0.0, BoundaryAmplitudes(1, 1))
    assert P.allclose(ComplexPoly([0, 1]) * ComplexPoly([1, -0.6]) * ComplexPoly([1, 0, 0, 0, -1]))
    zs = P.roots().roots
    expected = np.concatenate([[0, 5 / 3], np.exp(2j * np.pi * np.arange(4) / 4)])
    d = np.abs(zs[:, None] - expected[None, :]).min(axis=1)
    assert np.all(d < 1e-12)


def test_obc_numerator_zero_circle():
    m = ModelSpec.hn(1, 0.6, 9)
    amps = BoundaryAmplitudes(0.8 + 0.1j, -0.3j)
    zs = numerator_P(m, 0.2, amps).roots().roots
    nz = zs[np.abs(zs) > 1e-12]
    radius = abs(1 * amps.first / (0.6 * amps.last)) ** (1 / 10)
    assert nz.size == 10 and np.allclose(np.abs(nz), radius, rtol=1e-12)


def test_dense_matrix_examples():
    H = dense_matrix(ModelSpec.hn(1, 0.6, 2))
    assert np.array_equal(H, np.array([[0, 1], [0.6, 0]]))
    assert np.allclose(sorted(np.linalg.eigvals(H).real), [-np.sqrt(0.6), np.sqrt(0.6)])
    ring = dense_matrix(ModelSpec.hn(1, 0.6, 2, "pbc"))
    assert np.allclose(sorted(np.linalg.eigvals(ring).real), [-1.6, 1.6])
    ssh = dense_matrix(ModelSpec.ssh(1.3, 0.7, 1, 1, 1))
    assert np.array_equal(ssh, np.array([[0, 1.3], [0.7, 0]]))


def test_validation_errors():
    with pytest.raises(ConfigError):
        ModelSpec.hn(1, 0.6, 1)
    with pytest.raises(ConfigError):
        ModelSpec.hn(0, 0.6, 5)
    with pytest.raises(ConfigError):
        ModelSpec.hn(1, 0.6, 5, V=1, site=6)
    with pytest.raises(UnsupportedCombination):
        ModelSpec("ssh", 1, 1, 4, "pbc", 1, 1)
    with pytest.raises(UnsupportedCombination):
        ModelSpec("ssh", 1, 1, 4, "obc", 1, 1, (2, 0.5))
    with pytest.raises(UnsupportedCombination):
        ModelSpec.hn(1, 0.6, 5, "pbc", V=1, site=3)
    with pytest.raises(ConfigError):
        ModelSpec.from_dict({"kind": "hn", "tL": 1})
    with pytest.raises(ValueError):
        BoundaryAmplitudes(0, 0)


def test_dict_roundtrip(rng):
    for fam in FAMILIES:
        m = random_model(rng, fam, N=7)
        assert ModelSpec.from_dict(m.to_dict()) == m


@pytest.mark.parametrize("family", FAMILIES)
def test_dense_and_matrix_free_agree(family, rng):
    for _ in range(5):
        m = random_model(rng, family, N=int(rng.integers(2, 15)))
        psi = rng.standard_normal(m.dim) + 1j * rng.standard_normal(m.dim)
        assert np.max(np.abs(dense_matrix(m) @ psi - apply_hamiltonian(m, psi))) <= 1e-12 * np.linalg.norm(psi)


@pytest.mark.parametrize("family", FAMILIES)
def test_numerator_generates_eigenvector(family, rng):
    """Q times the amplitude polynomial equals P, so P/Q expands to the eigenvector."""
    for _ in range(3):
        m = random_model(rng, family, N=int(rng.integers(3, 12)))
        w, v = np.linalg.eig(dense_matrix(m))
        for k in range(w.size):
            E, psi = w[k], v[:, k]
            Q = kernel_Q(m, E)
            P = numerator_P(m, E, boundary_amplitudes(m, psi))
            if isinstance(P, tuple):
                parts = [(P[0], psi[0::2]), (P[1], psi[1::2])]
            else:
                parts = [(P, psi)]
            for Pk, amps in parts:
                diff = (Q * ComplexPoly(np.r_[0, amps]) - Pk).coeffs
                assert np.max(np.abs(diff), initial=0) <= 1e-10


def test_interior_recurrence_from_series():
    m = ModelSpec.hn(0.9, 0.4 + 0.2j, 11)
    w, v = np.linalg.eig(dense_matrix(m))
    E, psi = w[0], v[:, 0]
    g = RationalGF(numerator_P(m, E, boundary_amplitudes(m, psi)), kernel_Q(m, E), m.N)
    b = g.window()
    r = m.tR * b[:-2] + m.tL * b[2:] - E * b[1:-1]
    assert np.max(np.abs(r)) <= 1e-9 * np.linalg.norm(b)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30), st.complex_numbers(max_magnitude=2), st.complex_numbers(max_magnitude=2),
       st.complex_numbers(max_magnitude=2), st.complex_numbers(max_magnitude=2))
def test_pbc_numerator_divisible_by_ring_factor(N, a, b, E, tR):
    if abs(tR) < 0.1 or (a == 0 and b == 0):
        return
    m = ModelSpec.hn(1.0, tR, N, "pbc")
    P = numerator_P(m, E, BoundaryAmplitudes(a, b))
    ring = ComplexPoly([1.0] + [0.0] * (N - 1) + [-1.0])
    # P/z divided by (1 - z^N) leaves a linear factor and no remainder
    c = P.coeffs[1:]
    quotient = np.zeros(c.size - N, dtype=complex)
    rem = c.copy()
    for k in range(quotient.size):
        quotient[k] = rem[k]
        rem[k:k + N + 1] -= quotient[k] * ring.coeffs
    assert np.max(np.abs(rem)) <= 1e-12 * max(1.0, np.max(np.abs(c)))
