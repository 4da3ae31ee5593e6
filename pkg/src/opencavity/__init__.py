"""Transmission through open quantum cavities.

An open cavity is a tight-binding lattice block coupled to two
single-channel leads. Everything observable is derived from the
energy-dependent effective Hamiltonian H_eff(E) = H_B + sum of channel
self-energies: its biorthogonal spectrum carries the resonance energies,
widths and phase rigidities; the scattering matrix built from the same
surface Green's function is unitary by construction; transmission can be
evaluated independently from the resonance expansion and from a direct
linear solve, and the two agree to rounding wherever the spectrum is not
defective. Exceptional points, resonance trapping and the crossover to
plateau transmission are exposed through dedicated searches and
config-driven studies with deterministic CSV export.
"""

__version__ = "0.1.0"

from .exceptions import (
    ConvergenceFailure,
    DefectiveSpectrum,
    ExceptionalPointNotFound,
    InvalidGeometry,
    InvalidMatrix,
    NotNormalized,
    OpenCavityError,
    OutsideBand,
    ParseError,
    PoleOnAxis,
    SingularMatrix,
    UndefinedValue,
    ValidationError,
    WriteError,
)
from .linalg import EigenSystem, eig_general, minimize_simplex, solve_linear
from .model import (
    CavityModel,
    LatticeSpec,
    LeadChannel,
    LeadSpec,
    build_hb,
    lead_contact_amplitude,
    lead_self_energy,
    surface_green,
)
from .spectrum import (
    EPReport,
    PoleResult,
    ResonanceState,
    SpectralSet,
    assemble_heff,
    biorthogonal_spectrum,
    find_exceptional_point,
    fixed_point_poles,
    track_sweep,
)
from .rigidity import (
    RigidityReport,
    b_antisymmetry_residual,
    build_report,
    rho_direct,
    rho_spectral,
)
from .scattering import (
    ScatteringSolution,
    TwoLevelProfile,
    coefficients_c,
    interior_wavefunction,
    s_matrix,
    solve_scattering,
    transmission_direct,
    transmission_spectral,
    two_level_profile,
    wigner_delay,
    width_vs_coupling,
)
from .sweeps import (
    STUDIES,
    AlphaGrid,
    EnergyGrid,
    RunConfig,
    StudyResult,
    count_peaks,
    export_csv,
    format_csv,
    parse_config,
    run_crossover_study,
    run_delay_study,
    run_ep_study,
    run_rigidity_study,
    run_study,
    run_transmit_study,
    run_trapping_study,
    serialize_config,
)

__all__ = [
    "__version__",
    "OpenCavityError",
    "InvalidMatrix",
    "ConvergenceFailure",
    "SingularMatrix",
    "InvalidGeometry",
    "OutsideBand",
    "NotNormalized",
    "UndefinedValue",
    "PoleOnAxis",
    "DefectiveSpectrum",
    "ExceptionalPointNotFound",
    "ParseError",
    "ValidationError",
    "WriteError",
    "EigenSystem",
    "eig_general",
    "solve_linear",
    "minimize_simplex",
    "LatticeSpec",
    "LeadSpec",
    "LeadChannel",
    "CavityModel",
    "build_hb",
    "surface_green",
    "lead_self_energy",
    "lead_contact_amplitude",
    "ResonanceState",
    "SpectralSet",
    "PoleResult",
    "EPReport",
    "assemble_heff",
    "biorthogonal_spectrum",
    "fixed_point_poles",
    "track_sweep",
    "find_exceptional_point",
    "RigidityReport",
    "rho_direct",
    "rho_spectral",
    "b_antisymmetry_residual",
    "build_report",
    "TwoLevelProfile",
    "ScatteringSolution",
    "coefficients_c",
    "interior_wavefunction",
    "solve_scattering",
    "transmission_spectral",
    "transmission_direct",
    "s_matrix",
    "wigner_delay",
    "width_vs_coupling",
    "two_level_profile",
    "STUDIES",
    "EnergyGrid",
    "AlphaGrid",
    "RunConfig",
    "StudyResult",
    "parse_config",
    "serialize_config",
    "run_transmit_study",
    "run_trapping_study",
    "run_rigidity_study",
    "run_delay_study",
    "run_ep_study",
    "run_crossover_study",
    "run_study",
    "format_csv",
    "export_csv",
    "count_peaks",
]
