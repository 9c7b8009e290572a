import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ppimex import euler, kernels
from ppimex.errors import AverageNotAdmissible, NonAdmissible
from ppimex.mesh import Inflow, Outflow, PostShock, Reflective

GAMMA = 1.4


def state(rho, u, p):
    return euler.from_primitive(rho, u, p, GAMMA)


def test_rho_e_and_pressure():
    U = np.array([1.0, 0.0, 0.0, 1.0])
    assert euler.rho_e(U) == 1.0
    assert abs(euler.pressure(U, GAMMA) - 0.4) < 1e-15
    assert euler.rho_e(np.array([2.0, 2.0, 0.0, 3.0])) == 2.0


def test_lax_left_total_energy():
    U = state(0.445, [0.698], 3.528)
    assert abs(U[-1] - (3.528 / 0.4 + 0.5 * 0.445 * 0.698 ** 2)) < 1e-14
    assert abs(U[-1] - 8.92840289) < 1e-12


def test_flux_stagnant():
    U = state(1.3, [0.0, 0.0], 0.7)
    F = euler.advective_flux(U, GAMMA)
    for a in range(2):
        assert F[a, 0] == 0 and F[a, -1] == 0
        np.testing.assert_allclose(F[a, 1:3], 0.7 * np.eye(2)[a], atol=1e-15)


def test_flux_example():
    U = np.array([1.0, 1.0, 0.0, 1.5])
    np.testing.assert_allclose(euler.advective_flux(U, GAMMA)[0], [1.0, 1.4, 0.0, 1.9], atol=1e-15)


def test_galilean_mass_flux():
    a = state(1.7, [0.3], 1.0)
    b = state(1.7, [0.8], 1.0)
    d = euler.advective_flux(b, GAMMA)[0, 0] - euler.advective_flux(a, GAMMA)[0, 0]
    assert abs(d - 1.7 * 0.5) < 1e-14


def test_wave_speeds():
    assert abs(euler.wave_speed(state(1.4, [0.0, 0.0], 1.0), [1, 0], GAMMA) - 1.0) < 1e-15
    s = euler.wave_speed(state(1.0, [3.0, 0.0], 0.4), [1, 0], GAMMA)
    assert abs(s - (3 + math.sqrt(0.56))) < 1e-14
    U = state(0.9, [0.4, -0.2], 2.0)
    assert euler.wave_speed(U, [1, 0], GAMMA) == euler.wave_speed(U, [-1, 0], GAMMA)


def test_max_wave_speed_rejects_bad_trace():
    good = state(1.0, [0.0], 1.0)
    bad = np.array([1.0, 2.0, 1.0])
    with pytest.raises(NonAdmissible):
        euler.max_wave_speed(good, bad, [1.0], GAMMA)


def test_lf_consistency_and_antisymmetry():
    a = state(1.0, [0.5, 0.1], 1.0)
    b = state(0.3, [-0.2, 0.4], 0.2)
    n = np.array([0.0, 1.0])
    np.testing.assert_allclose(euler.lax_friedrichs_flux(a, a, n, 3.0, GAMMA),
                               euler.normal_flux(a, n, GAMMA), atol=1e-15)
    np.testing.assert_allclose(euler.lax_friedrichs_flux(a, b, n, 3.0, GAMMA),
                               -euler.lax_friedrichs_flux(b, a, -n, 3.0, GAMMA), atol=1e-15)


def test_lf_sod_pair():
    UL = state(1.0, [0.0], 1.0)
    UR = state(0.125, [0.0], 0.1)
    # hand evaluation: both fluxes are (0, p, 0); E_L = 2.5, E_R = 0.25
    expect = np.array([0.5 * 0.0 - (1.0 * (0.125 - 1.0)),
                       0.5 * (1.0 + 0.1),
                       -(1.0 * (0.25 - 2.5))])
    np.testing.assert_allclose(euler.lax_friedrichs_flux(UL, UR, [1.0], 2.0, GAMMA), expect, atol=1e-15)


def test_admissible_set():
    eps = 1e-13
    assert euler.in_G_eps(np.array([eps, 0.0, 0.0, eps]), eps)
    assert not euler.in_G_eps(np.array([1.0, 2.0, 0.0, 1.0]), eps)


def test_limiter_identity_when_admissible(rng):
    U = np.stack([rng.uniform(1, 2, (5, 4)), rng.uniform(-1, 1, (5, 4)), rng.uniform(3, 4, (5, 4))])
    Ubar = U.mean(axis=-1)
    out = euler.limit_cells(U, U, Ubar, 1e-13)
    assert out is U


def test_limiter_density_example():
    eps = 1e-13
    pts = np.array([[-0.1, 2.1], [0.0, 0.0], [5.0, 5.0]])
    Ubar = pts.mean(axis=1)
    th_r, th_e = euler.limiter_thetas(pts[:, None], Ubar[:, None], eps)
    assert abs(th_r[0] - (1 - eps) / 1.1) < 1e-15
    out = euler.limit_cell(pts, Ubar, eps)
    assert abs(out[0].min() - eps) < 1e-15
    np.testing.assert_allclose(out.mean(axis=1), Ubar, rtol=1e-14)


def test_limiter_rejects_bad_average():
    with pytest.raises(AverageNotAdmissible):
        euler.limit_cell(np.array([[-1.0, 0.5], [0.0, 0.0], [1.0, 1.0]]), np.array([-0.25, 0.0, 1.0]), 1e-13)


finite = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.floats(-0.5, 3), finite, finite, st.floats(-0.5, 6)), min_size=2, max_size=9),
       st.floats(1e-13, 1e-3))
def test_limiter_properties(pts, eps):
    P = np.array(pts, dtype=float).T
    Ubar = P.mean(axis=1)
    if not euler.in_G_eps(Ubar, eps):
        return
    out = euler.limit_cell(P, Ubar, eps)
    np.testing.assert_allclose(out.mean(axis=1), Ubar, rtol=1e-13, atol=1e-13)
    assert np.all(out[0] >= eps * (1 - 1e-9))
    assert np.all(euler.rho_e(out) >= eps * (1 - 1e-6) - 1e-14)
    again = euler.limit_cell(out, Ubar, eps)
    np.testing.assert_allclose(again, out, rtol=1e-13, atol=1e-13)


def test_kernel_limiter_matches_reference(rng):
    nv, nc, nl = 4, 500, 9
    U = np.stack([rng.uniform(-0.2, 2.0, (nc, nl)), rng.normal(size=(nc, nl)),
                  rng.normal(size=(nc, nl)), rng.uniform(0.0, 4.0, (nc, nl))])
    w = np.full(nl, 1 / nl)
    Ubar = U @ w
    ok = euler.in_G_eps(Ubar, 1e-13)
    U = np.ascontiguousarray(U[:, ok])
    ref = euler.limit_cells(U, U, U @ w, 1e-13)
    got = U.copy()
    assert kernels.check_and_limit(got, U.copy(), U @ w, 1e-13) == -1
    np.testing.assert_allclose(got, ref, rtol=1e-13, atol=1e-14)


def test_convexity_of_G(rng):
    for _ in range(200):
        a = state(rng.uniform(0.01, 2), rng.normal(size=2), rng.uniform(0.01, 2))
        b = state(rng.uniform(0.01, 2), rng.normal(size=2), rng.uniform(0.01, 2))
        s = rng.uniform()
        assert euler.in_G_eps(s * a + (1 - s) * b, 1e-13)


def test_ghost_states():
    U = np.array([[1.0], [3.0], [2.0], [10.0]])
    g = euler.ghost_state(Reflective(), U, np.array([1.0, 0.0]), np.zeros((1, 2)), 0.0)
    np.testing.assert_array_equal(g[:, 0], [1.0, -3.0, 2.0, 10.0])
    assert euler.ghost_state(Outflow(), U, np.array([1.0, 0.0]), np.zeros((1, 2)), 0.0) is U
    g = euler.ghost_state(Inflow((2.0, 0.0, 0.0, 5.0)), U, np.array([1.0, 0.0]), np.zeros((1, 2)), 0.0)
    np.testing.assert_array_equal(g[:, 0], [2.0, 0.0, 0.0, 5.0])


def test_mach10_post_shock_ghost():
    from ppimex.scenarios import double_mach
    spec = double_mach(euler.GasParams())
    tag = next(s.tag.hyperbolic for s in spec.domain.boundary_segments
               if isinstance(s.tag.hyperbolic, PostShock))
    s3 = math.sqrt(3)
    pts = np.array([[0.0, 0.5], [0.1, 0.0], [1.0, 0.1], [2.0, 1.0]])
    left = 6 * pts[:, 0] - 2 * s3 * pts[:, 1] - 1 < 0
    out = euler.ghost_state(tag, np.zeros((4, 4)), np.array([0.0, 1.0]), pts, 0.0)
    post = state(8.0, [4.125 * s3, -4.125], 116.5)
    pre = state(1.4, [0.0, 0.0], 1.0)
    for i in range(4):
        np.testing.assert_allclose(out[:, i], post if left[i] else pre, rtol=1e-14)


def test_mach10_rankine_hugoniot():
    rho1, u1, p1, s = euler.normal_shock(1.4, 1.0, 10.0, GAMMA)
    assert abs(s - 10.0) < 1e-13
    assert abs(rho1 - 8.0) < 1e-12 and abs(p1 - 116.5) < 1e-12 and abs(u1 - 8.25) < 1e-12
    # mass and momentum fluxes balance in the shock frame
    assert abs(rho1 * (u1 - s) - 1.4 * (0 - s)) < 1e-12
    assert abs(rho1 * (u1 - s) ** 2 + p1 - (1.4 * s * s + 1.0)) < 1e-10


def test_strain_tensor_inequality(rng):
    G = rng.normal(size=(100000, 2, 2))
    div = G[:, 0, 0] + G[:, 1, 1]
    assert np.all(euler.strain_norm_sq(G) - 0.5 * div ** 2 >= -1e-12)
