"""Weak-value-amplified metrology with a quadratic (Kerr-type) qubit-meter coupling."""

from .errors import (
    ConfigError,
    DegeneratePostselection,
    DivergentWeakValue,
    InsufficientPoints,
    NonpositiveData,
    NonpositiveInformation,
    PathMismatch,
    WvaError,
    ZeroDetuning,
)
from .fock_core import (
    CoherentProbe,
    CouplingConfig,
    TruncatedMeterState,
    coherent_amplitudes,
    default_cutoff,
    encode_phase,
    photon_moment,
    truncation_cutoff,
)
from .infotheory import (
    FisherReport,
    OutcomeDistribution,
    classical_fisher,
    classical_fisher_fd,
    crb_bound,
    fisher_report,
    outcome_distribution,
    qfi_closed_form,
    qfi_conventional,
    qfi_derivative_path,
)
from .postselect import (
    PpsAngles,
    PpsCoefficients,
    amplified_strength,
    postselected_state,
    postselection_probability,
    pps_coefficients,
    weak_value,
)

__version__ = "0.1.0"
