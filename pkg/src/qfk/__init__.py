"""Quantum Feynman-Kac machinery at finite dimension.

Coefficient algebra for QSDE generators, flow-generator structure maps,
perturbed semigroup generators, cocycle matrix elements between exponential
vectors, and a discrete repeated-interaction simulation oracle.
"""

from .coefficients import (
    BlockCoefficient,
    CoefficientFlags,
    classify,
    coefficient_from_json,
    coefficient_to_json,
    contraction_decomposition,
    delta_perp,
    delta_projection,
    min_quasicontractivity_beta,
    q_form,
    q_form_adjoint,
    transform_double_prime,
    transform_prime,
)
from .flows import (
    FlowGenerator,
    NotUnitaryGeneratorError,
    OperatorMap,
    StructureReport,
    ampliate,
    flow_from_json,
    flow_to_json,
    from_hp_coefficient,
    hp_coefficient_for_flow,
    trivial_flow,
    validate_structure,
)
from .linalg import DimensionMismatchError, NotPositiveSemidefiniteError
from .matrix_elements import (
    StepFunction,
    chi,
    cocycle_matrix_element,
    exponential_inner_product,
    stepfunction_from_json,
    stepfunction_to_json,
    tail_inner_product,
    tau_generator,
    verify_cocycle_identity,
)
from .perturbations import (
    PerturbationSpec,
    Superoperator,
    choi_matrix,
    fk_generator,
    is_cp,
    is_unital,
    phi_perturbed,
    phi_perturbed_blockform,
    psi_map,
    semigroup_at,
    vacuum_generator,
)
from .toy_fock import (
    DiscreteProcess,
    MemoryCapExceededError,
    ToyFockModel,
    cocycle_vacuum_corner,
    discrete_increment,
    fk_expectation_channel,
    fk_expectation_estimate,
    hp_vacuum_compression,
    isometry_defect_channel,
    ladder_verdict,
    multiplier_cocycle_check,
    multiplier_cocycle_residual,
    simulate_flow,
    simulate_hp_unitary,
    simulate_perturbation,
    stochastic_derivative_estimate,
    vacuum_expect,
)

__version__ = "0.1.0"

__all__ = [
    "BlockCoefficient",
    "CoefficientFlags",
    "DimensionMismatchError",
    "DiscreteProcess",
    "FlowGenerator",
    "MemoryCapExceededError",
    "NotPositiveSemidefiniteError",
    "NotUnitaryGeneratorError",
    "OperatorMap",
    "PerturbationSpec",
    "StepFunction",
    "StructureReport",
    "Superoperator",
    "ToyFockModel",
    "ampliate",
    "chi",
    "choi_matrix",
    "classify",
    "cocycle_matrix_element",
    "cocycle_vacuum_corner",
    "coefficient_from_json",
    "coefficient_to_json",
    "contraction_decomposition",
    "delta_perp",
    "delta_projection",
    "discrete_increment",
    "exponential_inner_product",
    "fk_expectation_channel",
    "fk_expectation_estimate",
    "fk_generator",
    "flow_from_json",
    "flow_to_json",
    "from_hp_coefficient",
    "hp_coefficient_for_flow",
    "hp_vacuum_compression",
    "is_cp",
    "is_unital",
    "isometry_defect_channel",
    "ladder_verdict",
    "min_quasicontractivity_beta",
    "multiplier_cocycle_check",
    "multiplier_cocycle_residual",
    "phi_perturbed",
    "phi_perturbed_blockform",
    "psi_map",
    "q_form",
    "q_form_adjoint",
    "semigroup_at",
    "simulate_flow",
    "simulate_hp_unitary",
    "simulate_perturbation",
    "stepfunction_from_json",
    "stepfunction_to_json",
    "stochastic_derivative_estimate",
    "tail_inner_product",
    "tau_generator",
    "transform_double_prime",
    "transform_prime",
    "trivial_flow",
    "vacuum_expect",
    "vacuum_generator",
    "validate_structure",
    "verify_cocycle_identity",
]
