import numpy as np
import pytest

from ppimex.euler import GasParams
from ppimex.mesh import DomainSpec, FaceTag, Neumann, Outflow, Segment, build_mesh


def unit_square(tag=None, periodic=False):
    if periodic:
        return DomainSpec([((0.0, 0.0), (1.0, 1.0))], (), frozenset({0, 1}))
    tag = tag or FaceTag(Outflow(), Neumann())
    return DomainSpec([((0.0, 0.0), (1.0, 1.0))],
                      [Segment(a, c, tag=tag) for a in (0, 1) for c in (0.0, 1.0)])


def interval(lo=0.0, hi=1.0, tag=None, periodic=False):
    if periodic:
        return DomainSpec([((lo,), (hi,))], (), frozenset({0}))
    tag = tag or FaceTag(Outflow(), Neumann())
    return DomainSpec([((lo,), (hi,))], [Segment(0, lo, tag=tag), Segment(0, hi, tag=tag)])


@pytest.fixture
def gas():
    return GasParams()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def square_mesh():
    return build_mesh(unit_square(), 0.25)


@pytest.fixture
def periodic_mesh():
    return build_mesh(unit_square(periodic=True), 0.25)
