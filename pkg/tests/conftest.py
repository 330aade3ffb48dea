from __future__ import annotations

import mpmath
import numpy as np
import pytest

from gflattice.models import ModelSpec


def random_hopping(rng, lo=0.3, hi=2.0, phases=True):
    mag = rng.uniform(lo, hi)
    if phases and rng.random() < 0.5:
        return complex(mag * np.exp(1j * rng.uniform(-np.pi, np.pi)))
    return float(mag)


FAMILIES = ("hn-obc", "hn-pbc", "hn-imp-obc", "hn-imp-pbc", "ssh-obc")


def random_model(rng, family, N=None, phases=True):
    N = int(rng.integers(3, 61)) if N is None else N
    h = lambda: random_hopping(rng, phases=phases)
    if family == "hn-obc":
        return ModelSpec.hn(h(), h(), N)
    if family == "hn-pbc":
        return ModelSpec.hn(h(), h(), N, "pbc")
    if family == "hn-imp-obc":
        return ModelSpec.hn(h(), h(), N, V=h(), site=int(rng.integers(1, N + 1)))
    if family == "hn-imp-pbc":
        return ModelSpec.hn(h(), h(), N, "pbc", V=h())
    if family == "ssh-obc":
        return ModelSpec.ssh(h(), h(), h(), h(), N)
    raise ValueError(family)


def expand_roots_mp(roots, dps=40):
    """Coefficients (low to high) of prod(z - r), expanded in extended precision."""
    with mpmath.workdps(dps):
        c = [mpmath.mpc(1)]
        for r in roots:
            r = mpmath.mpc(complex(r))
            nxt = [mpmath.mpc(0)] * (len(c) + 1)
            for k, a in enumerate(c):
                nxt[k + 1] += a
                nxt[k] -= r * a
            c = nxt
        return np.array([complex(x) for x in c])


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
