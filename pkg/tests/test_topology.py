from __future__ import annotations

import numpy as np
import pytest

from gflattice.errors import ContourHitsZero, UnsupportedCombination
from gflattice.models import ModelSpec
from gflattice.solvers import solve
from gflattice.topology import gbz_radius, winding_nuA, winding_W


def test_gbz_radius_examples():
    assert abs(gbz_radius(ModelSpec.hn(1, 0.6, 5)) - 1.2909944487358056) < 1e-15
    assert gbz_radius(ModelSpec.hn(0.7, 0.7, 5)) == 1.0
    for lam in (0.7, 0.9, 1.2, 1.3):
        assert abs(gbz_radius(ModelSpec.ssh_family(lam, 5)) - 1.25) < 1e-15


def test_skin_winding_examples():
    left = winding_W(ModelSpec.hn(1, 0.6, 10), 0)
    assert left.value == 1 and left.count == 1 and left.gap <= 1e-6
    assert winding_W(ModelSpec.hn(0.6, 1, 10), 0).value == -1
    assert winding_W(ModelSpec.hn(1, 1, 10), 3).value == 0


def test_winding_guard():
    with pytest.raises(ContourHitsZero):
        winding_W(ModelSpec.hn(1, 1, 10), 0)  # zeros at +-i sit on the unit circle
    with pytest.raises(ContourHitsZero):
        winding_nuA(ModelSpec.ssh_family(1.0, 10))


def test_nuA_examples():
    assert winding_nuA(ModelSpec.ssh_family(0.9, 20)).value == 1
    assert winding_nuA(ModelSpec.ssh_family(1.2, 20)).value == 0
    with pytest.raises(UnsupportedCombination):
        winding_nuA(ModelSpec.hn(1, 0.6, 4))


@pytest.mark.parametrize("t1,t2", [(1.0, 1.5), (1.5, 1.0), (0.4, 0.9), (0.9, 0.4)])
def test_nuA_hermitian_ssh(t1, t2):
    m = ModelSpec.ssh(t1, t1, t2, t2, 10)
    assert winding_nuA(m).value == int(t2 > t1)


def test_nuA_steps_once_at_unity():
    lams = np.linspace(0.5, 1.5, 101)
    lams = lams[np.abs(lams - 1) > 1e-9]
    vals = [winding_nuA(ModelSpec.ssh_family(l, 10)).value for l in lams]
    changes = np.flatnonzero(np.diff(vals))
    assert changes.size == 1
    assert lams[changes[0]] < 1 < lams[changes[0] + 1]


def test_winding_swap_antisymmetry(rng):
    for _ in range(40):
        tL, tR = rng.uniform(0.3, 2, 2)
        # an energy inside the PBC ellipse
        E = 0.5 * (tL + tR) * rng.uniform(-1, 1) + 0.5j * abs(tL - tR) * rng.uniform(-1, 1)
        try:
            a = winding_W(ModelSpec.hn(tL, tR, 8), E).value
            b = winding_W(ModelSpec.hn(tR, tL, 8), E).value
        except ContourHitsZero:
            continue
        assert a == -b


def test_winding_matches_state_tags():
    for tL, tR, tag in ((1, 0.6, "skin-left"), (0.6, 1, "skin-right")):
        m = ModelSpec.hn(tL, tR, 12)
        w = winding_W(m, 0).value
        assert all(tag in p.tags for p in solve(m).pairs)
        assert (w == 1) == (tag == "skin-left")


def test_edge_pairs_follow_nuA():
    for lam in np.linspace(0.7, 1.3, 50):
        if abs(lam - 1) < 0.02:
            continue
        m = ModelSpec.ssh_family(lam, 40)
        edges = sum("edge" in p.tags for p in solve(m).pairs)
        assert (winding_nuA(m).value == 1) == (edges >= 1)
