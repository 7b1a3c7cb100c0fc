"""tinyheat: the two smallest self-contained quantum heat engines, simulated and solved.

A two-qubit machine (or a single qutrit) couples two thermal reservoirs to a
truncated weight ladder.  The package integrates the reset-model master
equation exactly (brute-force density-matrix dynamics) and carries the full
set of closed-form results — asymptotic work rate, populations, heat
currents, efficiency, Carnot limit, transient decay rates, and the qutrit
lifting conditions — so every formula can be checked against the simulation
and vice versa.

Units: hbar = 1 and the Boltzmann constant defaults to 1 (configurable via
PhysicalConstants).
"""

from .params import (
    DEFAULT_CONSTANTS,
    BiasReport,
    LadderWindow,
    ParameterError,
    PhysicalConstants,
    QutritEngineParams,
    ThermalPopulation,
    TwoQubitEngineParams,
    joint_bias,
    thermal_population,
    validate_weak_coupling,
)
from .operators import (
    QUTRIT_MACHINE_LABELS,
    TWO_QUBIT_MACHINE_LABELS,
    ModelOperators,
    ResetChannel,
    build_qutrit,
    build_two_qubit,
    stationary_machine_populations,
    thermal_product_state,
)
from .dynamics import (
    CSV_HEADER,
    BoundaryOverflowError,
    DriftDiffusionFit,
    IntegratorConfig,
    QutritObservables,
    StepInstabilityError,
    Trajectory,
    TwoQubitObservables,
    boundary_population,
    default_dt,
    default_integrator_config,
    fit_coherence_decay_rate,
    fit_drift_diffusion,
    integrate,
    master_rhs,
    observables_qutrit,
    observables_two_qubit,
    work_rate_instant,
)
from .reduced import (
    AsymptoteReport,
    CharacteristicRoots,
    ClosedFormSolution,
    LiftingConditionReport,
    ReducedStateQutrit,
    ReducedStateTwoQubit,
    asymptote_report,
    characteristic_roots,
    closed_form_delta,
    delta_infinity,
    fixed_point_two_qubit,
    gamma_infinity,
    lifting_condition_qutrit,
    main_text_equal_rates_work_rate,
    qutrit_stationary,
    reduced_rhs_qutrit,
    reduced_rhs_two_qubit,
    system_matrix_qutrit,
    system_matrix_two_qubit,
    work_rate_qutrit,
    work_rate_two_qubit,
)
from .thermo import (
    CARNOT_CSV_HEADER,
    CarnotSweepResult,
    CarnotSweepRow,
    EfficiencyReport,
    HeatReport,
    carnot_sweep,
    efficiency_report,
    heat_current,
    heat_current_asymptote,
    heat_report,
    heat_report_asymptote,
)
from .config import ConfigError, ScenarioConfig, SweepSpec, load_config

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CONSTANTS",
    "BiasReport",
    "LadderWindow",
    "ParameterError",
    "PhysicalConstants",
    "QutritEngineParams",
    "ThermalPopulation",
    "TwoQubitEngineParams",
    "joint_bias",
    "thermal_population",
    "validate_weak_coupling",
    "QUTRIT_MACHINE_LABELS",
    "TWO_QUBIT_MACHINE_LABELS",
    "ModelOperators",
    "ResetChannel",
    "build_qutrit",
    "build_two_qubit",
    "stationary_machine_populations",
    "thermal_product_state",
    "CSV_HEADER",
    "BoundaryOverflowError",
    "DriftDiffusionFit",
    "IntegratorConfig",
    "QutritObservables",
    "StepInstabilityError",
    "Trajectory",
    "TwoQubitObservables",
    "boundary_population",
    "default_dt",
    "default_integrator_config",
    "fit_coherence_decay_rate",
    "fit_drift_diffusion",
    "integrate",
    "master_rhs",
    "observables_qutrit",
    "observables_two_qubit",
    "work_rate_instant",
    "AsymptoteReport",
    "CharacteristicRoots",
    "ClosedFormSolution",
    "LiftingConditionReport",
    "ReducedStateQutrit",
    "ReducedStateTwoQubit",
    "asymptote_report",
    "characteristic_roots",
    "closed_form_delta",
    "delta_infinity",
    "fixed_point_two_qubit",
    "gamma_infinity",
    "lifting_condition_qutrit",
    "main_text_equal_rates_work_rate",
    "qutrit_stationary",
    "reduced_rhs_qutrit",
    "reduced_rhs_two_qubit",
    "system_matrix_qutrit",
    "system_matrix_two_qubit",
    "work_rate_qutrit",
    "work_rate_two_qubit",
    "CARNOT_CSV_HEADER",
    "CarnotSweepResult",
    "CarnotSweepRow",
    "EfficiencyReport",
    "HeatReport",
    "carnot_sweep",
    "efficiency_report",
    "heat_current",
    "heat_current_asymptote",
    "heat_report",
    "heat_report_asymptote",
    "ConfigError",
    "ScenarioConfig",
    "SweepSpec",
    "load_config",
    "__version__",
]
