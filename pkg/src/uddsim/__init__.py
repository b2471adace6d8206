"""Pulse-sequence decoherence suppression for two-qubit and M-level systems.

The package splits into a small stack of layers: dense linear algebra
primitives (:mod:`uddsim.linalg`), operator algebra and adapted bases
(:mod:`uddsim.algebra`), pulse schedules (:mod:`uddsim.pulses`),
randomized system+bath models (:mod:`uddsim.models`), time evolution and
coherence measurements (:mod:`uddsim.evolve`), an independent
brute-force verifier of the scaling identity (:mod:`uddsim.verify`), and
a CSV/figure-emitting CLI (:mod:`uddsim.cli`).
"""

from .algebra import (
    OperatorBasis,
    PolarizationOperator,
    SplitHamiltonian,
    mlevel_v_basis,
    pauli_product_basis,
    polarization_from_state,
    spin1_operators,
    split_hamiltonian,
    two_qubit_bell_basis,
    two_qubit_y_basis,
)
from .evolve import (
    StepPolicy,
    TimeSeries,
    avg_distance,
    coherence_expectation,
    delta_propagator,
    evolve_delta,
    evolve_gaussian,
    gaussian_propagator,
)
from .linalg import bracket, embed_factor, expm_unitary, kron, norm, partial_trace
from .models import (
    ModelInstance,
    build_three_level_bath,
    build_two_qubit_spin_bath,
    control_operator,
    generic_two_qubit_hamiltonian,
)
from .pulses import (
    PulseSchedule,
    PulseShape,
    control_field,
    gaussian_amplitude,
    periodic_times,
    pulse_unitary,
    switching_function,
    udd_times,
)
from .verify import (
    ScalingFit,
    build_u_pm,
    interaction_picture_check,
    random_hermitian_pair,
    scaling_slope,
    u_pm_from_schedule,
    yangliu_deviation,
)

__version__ = "0.1.0"

__all__ = [
    "OperatorBasis",
    "PolarizationOperator",
    "SplitHamiltonian",
    "mlevel_v_basis",
    "pauli_product_basis",
    "polarization_from_state",
    "spin1_operators",
    "split_hamiltonian",
    "two_qubit_bell_basis",
    "two_qubit_y_basis",
    "StepPolicy",
    "TimeSeries",
    "avg_distance",
    "coherence_expectation",
    "delta_propagator",
    "evolve_delta",
    "evolve_gaussian",
    "gaussian_propagator",
    "bracket",
    "embed_factor",
    "expm_unitary",
    "kron",
    "norm",
    "partial_trace",
    "ModelInstance",
    "build_three_level_bath",
    "build_two_qubit_spin_bath",
    "control_operator",
    "generic_two_qubit_hamiltonian",
    "PulseSchedule",
    "PulseShape",
    "control_field",
    "gaussian_amplitude",
    "periodic_times",
    "pulse_unitary",
    "switching_function",
    "udd_times",
    "ScalingFit",
    "build_u_pm",
    "interaction_picture_check",
    "random_hermitian_pair",
    "scaling_slope",
    "u_pm_from_schedule",
    "yangliu_deviation",
]
