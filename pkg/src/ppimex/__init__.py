"""Positivity-preserving IMEX DG solver for compressible Navier-Stokes."""
from .config import RunConfig, load_config, parse_config
from .convergence import mms_convergence
from .euler import GasParams
from .hyperbolic import DGSpace
from .mesh import DomainSpec, FaceTag, Segment, build_mesh
from .parabolic import IPDGParams, ParabolicOperators
from .scenarios import get_scenario, scenario_catalog
from .strang import Simulation, run_simulation, strang_step

__version__ = "0.1.0"

__all__ = [
    "DGSpace", "DomainSpec", "FaceTag", "GasParams", "IPDGParams", "ParabolicOperators",
    "RunConfig", "Segment", "Simulation", "build_mesh", "get_scenario", "load_config",
    "mms_convergence", "parse_config", "run_simulation", "scenario_catalog", "strang_step",
]
