"""Reduced-order RC circuit synthesis for porous-electrode supercapacitor models.

Pipeline: spectral-collocation assembly of the physics-based descriptor
model, algebraic elimination of the electrolyte potential, linearisation,
balanced truncation with integrator separation, and passive Foster/Cauer
network synthesis, verified against the model's frequency response.
"""

from .chebyshev import DiffMatrix, cheb_diff_matrix, clenshaw_curtis_weights
from .errors import (
    AmbiguousSplitError,
    AssemblyError,
    CircSynthError,
    ConfigError,
    DegeneracyError,
    EliminationError,
    ModelError,
    NotPositiveRealError,
    NotRCRealizableError,
    PassivityViolationError,
    SimulationFloorError,
    StabilityError,
    SynthesisError,
    UnsupportedPoleStructureError,
)
from .freqsim import (
    BodeData,
    ParamTrace,
    Trajectory,
    bode,
    default_omega_grid,
    harmonic_mean_concentration,
    simulate,
    track_parameters,
)
from .linearize import LTISystem, linearize, linearize_at_field
from .model import (
    DescriptorSystem,
    FieldRecovery,
    NonlinearODE,
    assemble_cell,
    build_ode,
    conserved_ion_content,
    eliminate_phi2,
    to_ode,
)
from .mor import (
    BalancedRealization,
    Grammians,
    ReductionReport,
    balance,
    balance_and_truncate,
    grammians,
    lumped_capacitance,
    mode_labels,
    reduce,
    sampled_hinf_error,
    solve_lyapunov,
    split_integrators,
)
from .netsynth import (
    Circuit,
    FosterExpansion,
    PRVerdict,
    cauer_expand,
    circuit_impedance,
    export_netlist,
    foster_expand,
    is_positive_real,
    ss_to_tf,
    synth_classical,
    synth_dynamic,
)
from .params import ModelParams, load_params, parse_config_text
from .rational import RationalFunction, from_partial_fractions

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
