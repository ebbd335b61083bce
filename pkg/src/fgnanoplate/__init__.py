"""Isogeometric free-vibration analysis of functionally graded nonlocal Mindlin nanoplates."""
from .assembly import BoundaryCondition, GlobalSystem, NonlocalParams, apply_bcs, assemble, element_matrices
from .config import AnalysisConfig, load_config
from .material import (
    ISOTROPIC_BENCHMARK,
    SI3N4_SUS304,
    ConstituentPair,
    FgmProfile,
    SectionProperties,
    section_constants,
)
from .modal import ModalResult, frequency_ratio, nondimensionalize, solve_modes
from .navier import NavierMode, navier_local_fsdt, nonlocal_ratio
from .nurbs import KnotVector, PatchMesh, eval_basis, make_patch
from .runner import run_converge, run_solve, run_sweep
from .validate import run_validate

__version__ = "0.1.0"
