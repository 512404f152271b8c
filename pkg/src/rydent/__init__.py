"""Entanglement estimates from computational-basis measurements of Rydberg arrays."""

from .counts import Counts, RunEnsemble, empirical, ensemble_stats, parse_counts, sample, truncate, truncate_exact
from .dynamics import EvolutionConfig, Schedule, Waveform, all_ground, evolve, standard_schedule
from .entropy import (
    DensityMatrix,
    EntropyReport,
    ProbabilityTable,
    distribution_entropies,
    probabilities,
    reduced_density_matrix,
    renyi2_distribution,
    renyi2_state,
    report,
    shannon,
    von_neumann,
)
from .errors import (
    ConvergenceError,
    CountsParseError,
    DegenerateDataError,
    IntegrationError,
    InvalidArgumentError,
    ResourceLimitError,
    RydentError,
)
from .hamiltonian import DriveParams, HamiltonianMatrix, build
from .lattice import AQUILA_LIMITS, DeviceLimits, Geometry, Partition, chain, half_partition, ladder, validate_device
from .spectra import EigenResult, StateVector, ground_state, lanczos_lowest
from .workflows import analyze, prepare_and_sample, sweep_chain, sweep_ladder

__version__ = "0.1.0"

__all__ = [
    "AQUILA_LIMITS",
    "ConvergenceError",
    "Counts",
    "CountsParseError",
    "DegenerateDataError",
    "DensityMatrix",
    "DeviceLimits",
    "DriveParams",
    "EigenResult",
    "EntropyReport",
    "EvolutionConfig",
    "Geometry",
    "HamiltonianMatrix",
    "IntegrationError",
    "InvalidArgumentError",
    "Partition",
    "ProbabilityTable",
    "ResourceLimitError",
    "RunEnsemble",
    "RydentError",
    "Schedule",
    "StateVector",
    "Waveform",
    "all_ground",
    "analyze",
    "build",
    "chain",
    "distribution_entropies",
    "empirical",
    "ensemble_stats",
    "evolve",
    "ground_state",
    "half_partition",
    "ladder",
    "lanczos_lowest",
    "parse_counts",
    "prepare_and_sample",
    "probabilities",
    "reduced_density_matrix",
    "renyi2_distribution",
    "renyi2_state",
    "report",
    "sample",
    "shannon",
    "standard_schedule",
    "sweep_chain",
    "sweep_ladder",
    "truncate",
    "truncate_exact",
    "validate_device",
    "von_neumann",
]
