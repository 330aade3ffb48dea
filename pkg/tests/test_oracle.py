from __future__ import annotations

import numpy as np
import pytest

from gflattice.errors import InterpolationIllConditioned, SlowConvergence
from gflattice.models import ModelSpec, dense_matrix
from gflattice.oracle import (det_at, det_recurrence_hn, interpolate_charpoly, match_spectra, oracle_eigenvector,
                              oracle_spectrum, overlap, simple_mask)


def test_det_examples():
    m = ModelSpec.hn(1, 0.6, 2)
    assert abs(det_at(m, 0) + 0.6) < 1e-15
    assert abs(det_at(m, np.sqrt(0.6))) <= 1e-12
    ssh = ModelSpec.ssh(1.3, 0.7, 1, 1, 1)
    assert abs(det_at(ssh, 0) + 1.3 * 0.7) < 1e-15


def test_det_matches_continuant(rng):
    for _ in range(20):
        m = ModelSpec.hn(*rng.uniform(0.3, 2, 2), int(rng.integers(2, 30)))
        E = complex(rng.normal(), rng.normal())
        a, b = det_at(m, E), det_recurrence_hn(m, E)
        assert abs(a - b) <= 1e-10 * max(abs(a), 1)


def test_oracle_spectrum_examples():
    s = oracle_spectrum(ModelSpec.hn(1, 1, 3))
    assert np.allclose(np.sort(s.eigenvalues.real), [-np.sqrt(2), 0, np.sqrt(2)], atol=1e-12)
    assert s.charpoly.degree == 3
    ring = oracle_spectrum(ModelSpec.hn(1, 0.6, 4, "pbc"))
    _, _, d = match_spectra(ring.eigenvalues, [1.6, -1.6, 0.4j, -0.4j])
    assert d < 1e-12
    E = oracle_spectrum(ModelSpec.ssh_family(0.9, 20)).eigenvalues
    _, _, d = match_spectra(E, -E)
    assert d < 1e-9


def test_oracle_agrees_with_numpy(rng):
    for _ in range(5):
        H = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
        _, _, d = match_spectra(oracle_spectrum(H).eigenvalues, np.linalg.eigvals(H))
        assert d < 1e-9


def test_charpoly_interpolant_checked_off_grid():
    H = dense_matrix(ModelSpec.hn(1, 0.6, 10))
    poly, E, dets = interpolate_charpoly(H, 4.0)
    assert poly.degree == 10 and E.size == 11
    # a sampling radius far too large loses the low coefficients to rounding
    with pytest.raises(InterpolationIllConditioned):
        interpolate_charpoly(dense_matrix(ModelSpec.hn(1, 0.6, 60)), 1e6)


def test_cap():
    with pytest.raises(ValueError):
        oracle_spectrum(ModelSpec.hn(1, 1, 10), cap=5)


def test_eigenvector_examples():
    m = ModelSpec.hn(1, 1, 3)
    v = oracle_eigenvector(m, np.sqrt(2))
    assert overlap(v, [1, np.sqrt(2), 1]) > 1 - 1e-12
    assert np.max(np.abs(v)) == 1.0


def test_eigenvector_degenerate_reports_candidates():
    H = np.diag([1.0, 1.0, 3.0]).astype(complex)
    H[0, 1] = 1e-3  # defective pair at E = 1
    with pytest.raises(SlowConvergence) as info:
        oracle_eigenvector(H, 1.0 + 0.3, maxiter=3)
    assert info.value.candidates


def test_simple_mask():
    assert list(simple_mask([0, 1e-12, 5])) == [False, False, True]
