"""Coherent-state quantum digital signatures: exact alphabet linear algebra,
minimum-cost measurement analysis, analytic security bounds, a detector-level
channel model, and a seeded Monte Carlo of the three-party protocol."""

from .states import (
    DensityMatrix,
    MultiportOutput,
    PhaseAlphabet,
    SpectralDecomposition,
    beamsplitter_mix,
    gram_spectrum,
    multiport_map,
    overlap,
    rotation_unitary,
    signature_element_density,
    state_coordinates,
    trace_distance,
    von_neumann_entropy,
)
from .channel import (
    ChannelModel,
    CostMatrix,
    bundled_cost_matrix,
    dark_fraction,
    dishonest_alice_null_rate,
    fit_calibration,
    ideal_click_probability,
    multiport_null_click_probability,
    null_rate_from_visibility,
    predicted_cost_matrix,
    signal_null_click_probability,
)
from .measurement import (
    ForgingAnalysis,
    HelstromReport,
    Povm,
    bounding_circulant_matrices,
    expected_cost,
    helstrom_verify,
    outcome_distribution,
    passive_forgery_analysis,
    risk_operators,
    square_root_povm,
)
from .bounds import (
    InfoBalance,
    SecurityReport,
    active_delta,
    active_forging_bound,
    build_security_report,
    forging_bound,
    info_balance,
    multiport_robustness_bound,
    nontrivial_length,
    repudiation_bound,
    robustness_bound,
    sweep_bounds,
    thresholds,
    trace_distance_from_fidelity,
    usd_probability,
)
from .simulate import (
    ActiveForger,
    BlockedInput,
    ExperimentSummary,
    HonestAlice,
    HonestBob,
    PassiveForger,
    PhaseTamper,
    ProtocolConfig,
    Transcript,
    TwoStateRepudiator,
    generate_private_key,
    passive_forge,
    run_distribution,
    run_experiment,
    run_trial,
    run_verification,
    run_verification_amplitudes,
    synthetic_scenario,
    trial_rng,
)
from .config import ConfigError, RunConfig, apply_preset

__version__ = "0.1.0"
