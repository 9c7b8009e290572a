"""Benchmark catalogue: domains, boundary layouts, initial data and presets.

Initial-condition callables take ``(x, xc, dx)`` where ``x`` are node
coordinates and ``xc`` the centres of the cells owning them, so data that
jump exactly on a cell face are assigned cell by cell.
"""
from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np

from .euler import GasParams, MovingShock, from_primitive, normal_shock
from .mesh import (DirichletVelEnergy, DomainSpec, FaceTag, Inflow, Neumann, Outflow,
                   PostShock, Reflective, Segment)


@dataclass(frozen=True)
class Preset:
    k: int
    dx: float
    cfl_a: float
    reynolds: float
    t_end: float
    conductivity: Optional[float] = None
    dt_fixed: Optional[float] = None


@dataclass
class ScenarioSpec:
    name: str
    description: str
    domain: DomainSpec
    initial: Callable
    presets: dict
    default_preset: str
    source_H: Optional[Callable] = None
    source_P: Optional[Callable] = None
    exact: Optional[Callable] = None
    convergence_dx: dict = field(default_factory=dict)


def _conserved(rho, u, p, gamma):
    return np.array(from_primitive(rho, u, p, gamma), dtype=float)


def _dirichlet_end(rho, u, p, gamma):
    U = _conserved(rho, [u], p, gamma)
    return FaceTag(Inflow(U), DirichletVelEnergy((u,), p / ((gamma - 1) * rho)))


def _riemann_1d(name, desc, lo, hi, left, right, gamma, presets, default):
    UL = _conserved(left[0], [left[1]], left[2], gamma)
    UR = _conserved(right[0], [right[1]], right[2], gamma)

    def initial(x, xc, dx):
        return np.where(xc[:, 0] < 0.0, UL[:, None], UR[:, None])

    domain = DomainSpec([((lo,), (hi,))], [
        Segment(0, lo, tag=_dirichlet_end(*left, gamma)),
        Segment(0, hi, tag=_dirichlet_end(*right, gamma)),
    ])
    return ScenarioSpec(name, desc, domain, initial, presets, default)


def lax(gas):
    presets = {
        "re1000": Preset(1, 10 / 512, 0.125, 1000.0, 1.3),
        "re100": Preset(1, 10 / 512, 0.125, 100.0, 1.3),
    }
    return _riemann_1d("lax", "Lax shock tube on [-5, 5]", -5.0, 5.0,
                       (0.445, 0.698, 3.528), (0.5, 0.0, 0.571), gas.gamma, presets, "re1000")


def double_rarefaction(gas):
    presets = {
        "re1000": Preset(1, 2 / 512, 0.125, 1000.0, 0.6),
        "re1000_fine": Preset(1, 2 / 2048, 0.125, 1000.0, 0.6),
    }
    return _riemann_1d("double_rarefaction", "Double rarefaction on [-1, 1]", -1.0, 1.0,
                       (7.0, -1.0, 0.2), (7.0, 1.0, 0.2), gas.gamma, presets, "re1000")


SEDOV_ENERGY = 0.244816


def sedov(gas):
    wall = FaceTag(Reflective(), Neumann())
    out = FaceTag(Outflow(), Neumann())
    domain = DomainSpec([((0.0, 0.0), (1.1, 1.1))], [
        Segment(0, 0.0, tag=wall), Segment(1, 0.0, tag=wall),
        Segment(0, 1.1, tag=out), Segment(1, 1.1, tag=out),
    ])

    def initial(x, xc, dx):
        corner = (xc[:, 0] < dx) & (xc[:, 1] < dx)
        U = np.zeros((4, len(x)))
        U[0] = 1.0
        U[3] = np.where(corner, SEDOV_ENERGY / dx ** 2, 1e-12)
        return U

    presets = {
        "q1_re200": Preset(1, 1.1 / 320, 0.5, 200.0, 1.0),
        "q2_re200": Preset(2, 1.1 / 320, 1.0, 200.0, 1.0),
        "q3_re200": Preset(3, 1.1 / 320, 1.0, 200.0, 1.0),
        "q1_re1000": Preset(1, 1.1 / 320, 0.5, 1000.0, 1.0),
        "desk_q1": Preset(1, 1.1 / 80, 0.5, 200.0, 0.2),
        "desk_q2": Preset(2, 1.1 / 80, 1.0, 200.0, 0.2),
    }
    return ScenarioSpec("sedov", "Sedov blast wave in the quarter plane [0, 1.1]^2",
                        domain, initial, presets, "desk_q1")


def _shock_initial(shock):
    return lambda x, xc, dx: shock.state(x, 0.0)


def shock_diffraction(gas):
    g = gas.gamma
    rho1, u1, p1, s = normal_shock(1.4, 1.0, 5.09, g)
    post = _conserved(rho1, [u1, 0.0], p1, g)
    pre = _conserved(1.4, [0.0, 0.0], 1.0, g)
    shock = MovingShock.from_line(post, pre, 1.0, 0.0, -0.5, s)
    wall = FaceTag(Reflective(), Neumann())
    out = FaceTag(Outflow(), Neumann())
    domain = DomainSpec([((0.0, 6.0), (1.0, 12.0)), ((1.0, 0.0), (13.0, 12.0))], [
        Segment(0, 0.0, 6.0, 12.0, FaceTag(Inflow(post), Neumann())),
        Segment(1, 6.0, 0.0, 1.0, wall),
        Segment(0, 1.0, 0.0, 6.0, wall),
        Segment(1, 0.0, 1.0, 13.0, out),
        Segment(0, 13.0, 0.0, 12.0, out),
        Segment(1, 12.0, 0.0, 13.0, FaceTag(PostShock(shock), Neumann())),
    ])
    presets = {
        "q1_re200": Preset(1, 1 / 96, 0.5, 200.0, 2.3),
        "q1_re1000": Preset(1, 1 / 96, 0.5, 1000.0, 2.3),
        "q2_re200": Preset(2, 1 / 64, 1.0, 200.0, 2.3),
        "q3_re200": Preset(3, 1 / 64, 1.0, 200.0, 2.3),
        "desk_q1": Preset(1, 1 / 8, 0.5, 200.0, 0.5),
    }
    return ScenarioSpec("shock_diffraction", "Mach 5.09 shock diffracting around a step",
                        domain, _shock_initial(shock), presets, "desk_q1")


def _mach10(gas):
    g = gas.gamma
    post = _conserved(8.0, [4.125 * math.sqrt(3.0), -4.125], 116.5, g)
    pre = _conserved(1.4, [0.0, 0.0], 1.0, g)
    shock = MovingShock.from_line(post, pre, 6.0, -2.0 * math.sqrt(3.0), -1.0, 10.0)
    return post, shock


def double_mach(gas):
    post, shock = _mach10(gas)
    fixed = FaceTag(Inflow(post), Neumann())
    domain = DomainSpec([((0.0, 0.0), (4.0, 1.0))], [
        Segment(0, 0.0, tag=fixed),
        Segment(0, 4.0, tag=FaceTag(Outflow(), Neumann())),
        Segment(1, 0.0, 0.0, 1 / 6, fixed),
        Segment(1, 0.0, 1 / 6, 4.0, FaceTag(Reflective(), Neumann())),
        Segment(1, 1.0, tag=FaceTag(PostShock(shock), Neumann())),
    ])
    presets = {
        "q1_re100": Preset(1, 1 / 480, 0.5, 100.0, 0.2),
        "q2_re100": Preset(2, 1 / 240, 1.0, 100.0, 0.2),
        "q3_re100": Preset(3, 1 / 240, 1.0, 100.0, 0.2),
        "q3_re1000": Preset(3, 1 / 240, 1.0, 1000.0, 0.2),
        "desk_q3": Preset(3, 1 / 60, 1.0, 100.0, 0.2),
        "desk_q1": Preset(1, 1 / 60, 0.5, 100.0, 0.2),
    }
    return ScenarioSpec("double_mach", "Double Mach reflection of a Mach 10 shock",
                        domain, _shock_initial(shock), presets, "desk_q3")


def reflection_diffraction(gas):
    post, shock = _mach10(gas)
    fixed = FaceTag(Inflow(post), Neumann())
    wall = FaceTag(Reflective(), Neumann())
    out = FaceTag(Outflow(), Neumann())
    domain = DomainSpec([((1.0, -1.0), (4.0, 0.0)), ((0.0, 0.0), (4.0, 1.0))], [
        Segment(0, 0.0, 0.0, 1.0, fixed),
        Segment(1, 0.0, 0.0, 1 / 6, fixed),
        Segment(1, 0.0, 1 / 6, 1.0, wall),
        Segment(0, 1.0, -1.0, 0.0, wall),
        Segment(1, -1.0, 1.0, 4.0, out),
        Segment(0, 4.0, -1.0, 1.0, out),
        Segment(1, 1.0, 0.0, 4.0, FaceTag(PostShock(shock), Neumann())),
    ])
    presets = {
        "q1_re100": Preset(1, 1 / 480, 0.5, 100.0, 0.2),
        "q1_re1000": Preset(1, 1 / 480, 0.5, 1000.0, 0.2),
        "q2_re1000": Preset(2, 1 / 240, 1.0, 1000.0, 0.2),
        "q3_re1000": Preset(3, 1 / 120, 1.0, 1000.0, 0.2),
        "desk_q1": Preset(1, 1 / 60, 0.5, 100.0, 0.2),
    }
    return ScenarioSpec("reflection_diffraction",
                        "Mach 10 shock reflecting off a wedge and diffracting past its corner",
                        domain, _shock_initial(shock), presets, "desk_q1")


MMS_DT = 2.0 ** -4 * 1e-4
MMS_T = 0.1024


def mms(gas):
    from .mms import MmsSolution
    sol = MmsSolution(gas)
    exact = sol.exact_U
    tag = FaceTag(Inflow(exact), DirichletVelEnergy(sol.velocity, sol.energy))
    domain = DomainSpec([((0.0, 0.0), (1.0, 1.0))],
                        [Segment(a, c, tag=tag) for a in (0, 1) for c in (0.0, 1.0)])
    presets = {
        f"q{k}": Preset(k, dx, 1.0, 1.0, MMS_T, conductivity=1.0, dt_fixed=MMS_DT)
        for k, dx in ((1, 1 / 32), (2, 1 / 64), (3, 1 / 8))
    }
    return ScenarioSpec("mms", "Manufactured smooth solution on the unit square",
                        domain, lambda x, xc, dx: exact(x, 0.0), presets, "q1",
                        source_H=sol.source_H, source_P=sol.source_P, exact=exact,
                        convergence_dx={1: (1 / 16, 1 / 32), 2: (1 / 32, 1 / 64), 3: (1 / 4, 1 / 8)})


def periodic_smooth(gas):
    from .mms import MmsSolution
    exact = MmsSolution(gas).exact_U
    domain = DomainSpec([((0.0, 0.0), (1.0, 1.0))], (), frozenset({0, 1}))
    presets = {f"q{k}": Preset(k, 1 / 8, 0.5, 1.0, 0.05) for k in (1, 2, 3)}
    return ScenarioSpec("periodic_smooth", "Smooth periodic flow without forcing",
                        domain, lambda x, xc, dx: exact(x, 0.0), presets, "q1")


CATALOG = {
    "lax": lax,
    "double_rarefaction": double_rarefaction,
    "sedov": sedov,
    "shock_diffraction": shock_diffraction,
    "double_mach": double_mach,
    "reflection_diffraction": reflection_diffraction,
    "mms": mms,
    "periodic_smooth": periodic_smooth,
}

BENCHMARKS = ("lax", "double_rarefaction", "sedov", "shock_diffraction",
                    "double_mach", "reflection_diffraction")


def get_scenario(name, gas=None):
    from .errors import ConfigError
    if name not in CATALOG:
        raise ConfigError(f"unknown scenario {name!r}; choose from {sorted(CATALOG)}")
    return CATALOG[name](gas or GasParams())


def scenario_catalog(gas=None):
    """The six physical benchmarks keyed by name."""
    return {name: get_scenario(name, gas) for name in BENCHMARKS}
