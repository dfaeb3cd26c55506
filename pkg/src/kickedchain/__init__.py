"""Kicked spin chain: single-excitation dynamics under periodic parabolic kicks.

The package simulates an exchange-coupled chain whose one-excitation
sector is driven by instantaneous parabolic phase kicks, realizing
kicked-rotor physics on a lattice: ballistic accelerator-mode wavepackets,
chaotic diffusion, dynamical localization, and measurement-heralded
two-packet superpositions.
"""

__version__ = "0.1.0"

from .chain import (
    EigenBasis,
    EvolutionContext,
    Trajectory,
    apply_kick,
    apply_uhc,
    build_eigenbasis,
    evolve,
    hop_eigenphases,
    make_context,
    oracle_hamiltonian,
    step_period,
    step_period_inverse,
    uhc_matrix,
)
from .config import (
    DEFAULTS,
    EXPERIMENTS,
    ExperimentConfig,
    apply_overrides,
    config_values,
    parse_config,
    serialize_config,
    with_experiment,
    with_output_dir,
)
from .errors import (
    CapacityError,
    ConfigError,
    DimensionMismatchError,
    InsufficientDataError,
    KickedChainError,
    MemoryBudgetError,
    NotLocalizedError,
    PacketsOutOfRangeError,
    QuadratureConvergenceError,
)
from .experiments import RunManifest, run_experiment, trackable_pulses
from .observables import (
    ConcurrenceMax,
    DiffusionFit,
    GaussianMode,
    LocalizationFit,
    ModeDecayFit,
    ModeReport,
    SiteDistribution,
    break_time,
    concurrence,
    concurrence_profile_max,
    detect_accelerator_modes,
    fit_diffusion,
    fit_localization_length,
    ipr,
    max_concurrence,
    mode_decay,
    q_measure,
    remnant_halfwidth,
    site_distribution,
    spread_variance,
)
from .params import ChainParams, DerivedParams, derived_params
from .protocol import (
    MeasurementOutcome,
    ProtocolReport,
    central_measurement,
    ideal_packet_pair,
    measurement_window,
    run_protocol,
)
from .qkr import (
    AcceleratorWindow,
    PhasePoint,
    RotorBasis,
    accelerator_window,
    bessel_interior_mask,
    bessel_j,
    classical_diffusion,
    frs_quadrature,
    qkr_kick_matrix,
    rechester_d,
    ring_kick_matrix,
    ring_propagator,
    standard_map_step,
)
from .state import SpinState, site_state
from .validation import CheckResult, ValidationReport, validate_suite
