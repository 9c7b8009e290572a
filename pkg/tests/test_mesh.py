import numpy as np
import pytest

from conftest import unit_square
from ppimex.errors import CoverageError, SnapError
from ppimex.mesh import (DomainSpec, FaceTag, Neumann, Outflow, Reflective, Segment,
                         build_mesh, closed_surface_residual, face_neighbors)


def test_unit_square_counts(square_mesh):
    assert square_mesh.ncells == 16
    assert square_mesh.n_interior_faces == 24
    assert square_mesh.n_boundary_faces == 16


def test_l_domain_cell_count():
    spec = DomainSpec([((0, 6), (1, 12)), ((1, 0), (13, 12))],
                      [Segment(a, c, tag=FaceTag(Outflow(), Neumann()))
                       for a, cs in ((0, (0, 1, 13)), (1, (0, 6, 12))) for c in cs])
    mesh = build_mesh(spec, 0.5)
    assert mesh.ncells == 2 * 12 + 24 * 24
    assert np.abs(closed_surface_residual(mesh)).max() < 1e-14


def test_periodic_counts(periodic_mesh):
    assert periodic_mesh.n_interior_faces == 32
    assert periodic_mesh.n_boundary_faces == 0


def test_interior_face_orientation(square_mesh):
    mesh = square_mesh
    a = mesh.lattice_to_cell[0, 0]
    b = mesh.lattice_to_cell[0, 1]
    for f in range(mesh.n_interior_faces):
        m, p, n = face_neighbors(mesh, f)
        if (m, p) == (a, b):
            np.testing.assert_array_equal(n, [1.0, 0.0])
            return
    pytest.fail("face between cells (0,0) and (1,0) not found")


def test_boundary_normal_outward(square_mesh):
    mesh = square_mesh
    for f in range(mesh.n_interior_faces, mesh.nfaces):
        c, tag, n = face_neighbors(mesh, f)
        if mesh.centers[c][0] < 0.25 and n[0] != 0:
            np.testing.assert_array_equal(n, [-1.0, 0.0])
            assert isinstance(tag, FaceTag)


def test_periodic_wrap_face(periodic_mesh):
    mesh = periodic_mesh
    m, p = mesh.interior_faces_on_axis(0)
    last = mesh.lattice_to_cell[2, 3]
    first = mesh.lattice_to_cell[2, 0]
    assert any(a == last and b == first for a, b in zip(m, p))


def test_closed_surface(square_mesh, periodic_mesh):
    for mesh in (square_mesh, periodic_mesh):
        assert np.abs(closed_surface_residual(mesh)).max() == 0.0


def test_snap_error():
    with pytest.raises(SnapError):
        build_mesh(unit_square(), 0.3)
    with pytest.raises(SnapError):
        build_mesh(unit_square(), -1.0)


def test_uncovered_boundary():
    spec = DomainSpec([((0.0, 0.0), (1.0, 1.0))],
                      [Segment(0, 0.0, tag=FaceTag(Outflow(), Neumann()))])
    with pytest.raises(CoverageError):
        build_mesh(spec, 0.5)


def test_conflicting_segments():
    a = FaceTag(Outflow(), Neumann())
    b = FaceTag(Reflective(), Neumann())
    segs = [Segment(ax, c, tag=a) for ax in (0, 1) for c in (0.0, 1.0)]
    segs.append(Segment(0, 0.0, tag=b))
    with pytest.raises(CoverageError):
        build_mesh(DomainSpec([((0.0, 0.0), (1.0, 1.0))], segs), 0.5)


def test_partial_segments_pick_tags():
    out = FaceTag(Outflow(), Neumann())
    wall = FaceTag(Reflective(), Neumann())
    segs = [Segment(0, 0.0, tag=out), Segment(0, 1.0, tag=out), Segment(1, 1.0, tag=out),
            Segment(1, 0.0, hi=0.5, tag=out), Segment(1, 0.0, lo=0.5, tag=wall)]
    mesh = build_mesh(DomainSpec([((0.0, 0.0), (1.0, 1.0))], segs), 0.25)
    walls = [f for (f, ti), c in mesh.boundary_groups.items() if mesh.tags[ti] == wall]
    cells = np.concatenate([mesh.boundary_groups[(f, mesh.tags.index(wall))] for f in set(walls)])
    assert sorted(mesh.centers[cells][:, 0]) == [0.625, 0.875]
