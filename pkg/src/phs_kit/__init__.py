"""phs-kit: finite-dimensional port-Hamiltonian DAE toolkit.

Model power-preserving interconnections as Dirac structures, assemble systems
with Hamiltonians and passive resistive relations, integrate them with
structure-preserving implicit schemes, and certify trajectories through weak
residuals, mollification and energy-balance audits.
"""

from .catalog import damped_oscillator, forced_oscillator, make_example, oscillator
from .dirac import (
    BondVector,
    DiracImageRep,
    DiracKernelRep,
    DiracValidation,
    ExtrapolationSplit,
    distance_to_structure,
    extrapolation_split,
    image_to_kernel,
    kernel_to_image,
    pairing,
    substructure_D0,
    validate_image,
    validate_kernel,
)
from .discretize import (
    DiffusionSpec,
    StringSpec,
    diffusion_system,
    psi_potential,
    string_system,
)
from .energy import (
    GeneralHamiltonian,
    LinearGraph,
    Modulated,
    Parametric,
    QuadraticHamiltonian,
    check_gradient,
    discrete_gradient,
    ham_eval,
    ham_grad,
    resistive_check,
    resistive_residual,
)
from .errors import DomainError, NewtonError, StructureError
from .fileio import (
    FileFormatError,
    load_system,
    load_trajectory,
    save_system,
    save_trajectory,
    system_from_dict,
    system_to_dict,
)
from .integrate import ConsistencyReport, SchemeConfig, consistent_init, simulate
from .system import PhsSystem, PortSignal, Trajectory, assemble, strong_residual
from .verify import (
    EnergyReport,
    MollifierConfig,
    StrongAudit,
    WeakReport,
    energy_report,
    mollify,
    strong_trajectory_audit,
    weak_residual,
)

__version__ = "0.1.0"

__all__ = [
    "BondVector",
    "ConsistencyReport",
    "DiffusionSpec",
    "DiracImageRep",
    "DiracKernelRep",
    "DiracValidation",
    "DomainError",
    "EnergyReport",
    "ExtrapolationSplit",
    "FileFormatError",
    "GeneralHamiltonian",
    "LinearGraph",
    "Modulated",
    "MollifierConfig",
    "NewtonError",
    "Parametric",
    "PhsSystem",
    "PortSignal",
    "QuadraticHamiltonian",
    "SchemeConfig",
    "StringSpec",
    "StrongAudit",
    "StructureError",
    "Trajectory",
    "WeakReport",
    "assemble",
    "check_gradient",
    "consistent_init",
    "damped_oscillator",
    "diffusion_system",
    "discrete_gradient",
    "distance_to_structure",
    "energy_report",
    "extrapolation_split",
    "forced_oscillator",
    "ham_eval",
    "ham_grad",
    "image_to_kernel",
    "kernel_to_image",
    "load_system",
    "load_trajectory",
    "make_example",
    "mollify",
    "oscillator",
    "pairing",
    "psi_potential",
    "resistive_check",
    "resistive_residual",
    "save_system",
    "save_trajectory",
    "simulate",
    "string_system",
    "strong_residual",
    "strong_trajectory_audit",
    "substructure_D0",
    "system_from_dict",
    "system_to_dict",
    "validate_image",
    "validate_kernel",
    "weak_residual",
]
