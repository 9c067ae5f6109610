"""Phase-space dynamics of a quasi-Bell qubit-oscillator state under the adiabatic approximation."""

from .config import RunConfig, emit_config, load_config, parse_config
from .density import (
    BranchedDensity,
    FockDensity,
    coherent_density,
    exact_evolve,
    matrix_diagnostics,
    reduced_density,
    to_fock,
    trace_distance,
)
from .dispmat import displacement_element, displacement_matrix, two_f_zero
from .measures import TimeSeries, integrate, negativity, sweep, wehrl_entropy, wigner_entropy
from .model import (
    DerivedParams,
    ModelParams,
    Parity,
    SpectralTable,
    build_spectral_table,
    choose_truncation,
    coefficient_c,
    derive_params,
    laguerre,
)
from .phasespace import (
    Field,
    FieldKind,
    PhaseGrid,
    default_grid,
    husimi_field,
    husimi_weak_closed,
    make_grid,
    p_coefficients,
    smooth_w_to_q,
    wigner_field,
    wigner_field_series,
)

__version__ = "0.1.0"
