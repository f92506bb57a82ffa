"""Growth-rate certificates for constrained switching linear systems.

The package splits along a hard information boundary:

* oracle side (knows the matrices): :mod:`cslscert.system`,
  :mod:`cslscert.whitebox`, :mod:`cslscert.config`;
* observation side (sees only sampled transitions and structural
  counts): :mod:`cslscert.samples`, :mod:`cslscert.solver`,
  :mod:`cslscert.bounds`.

A typical run draws seeded observations from a system, fits one
quadratic form per automaton node with a bisection over alternating
projections, and converts the certified contraction factor into a
deterministic lower bound and a probabilistic upper bound on the
worst-case growth rate.
"""

from .automaton import (
    Automaton,
    Cycle,
    ValidationReport,
    accepts_word,
    enumerate_cycles,
    sample_edge,
    validate,
)
from .bounds import (
    BoundsReport,
    ConfidenceSpec,
    PreconditionError,
    beta_of_epsilon,
    corollary_upper,
    deterministic_lower,
    epsilon_of_beta,
    support_threshold,
    theorem1_upper,
    theorem2_norm_bound,
)
from .config import ConfigError, bundled_example_path, parse_system_config
from .experiment import (
    ExperimentConfig,
    SweepResult,
    first_certification,
    point_report,
    run_pipeline,
    run_sweep,
)
from .samples import Observation, SampleSet, eta_sampled
from .solver import (
    CERTIFIED,
    NOT_CERTIFIED,
    MqlfCandidate,
    SolverConfig,
    VerificationReport,
    feasibility_probe,
    polish_gamma,
    solve_sampled,
    verify_candidate,
)
from .special import (
    CapGeometry,
    DomainError,
    cap_chord,
    cap_delta,
    cap_geometry,
    inv_reg_inc_beta,
    reg_inc_beta,
)
from .system import (
    Csls,
    draw_observations,
    max_norm_whitebox,
    observed_labels,
    sample_unit_sphere,
    simulate,
    step,
)
from .whitebox import cjsr_lower_bruteforce, whitebox_candidate, whitebox_gamma

__version__ = "0.1.0"

__all__ = [
    "Automaton", "Cycle", "ValidationReport", "accepts_word",
    "enumerate_cycles", "sample_edge", "validate",
    "BoundsReport", "ConfidenceSpec", "PreconditionError", "beta_of_epsilon",
    "corollary_upper", "deterministic_lower", "epsilon_of_beta",
    "support_threshold", "theorem1_upper", "theorem2_norm_bound",
    "ConfigError", "bundled_example_path", "parse_system_config",
    "ExperimentConfig", "SweepResult", "first_certification", "point_report",
    "run_pipeline", "run_sweep",
    "Observation", "SampleSet", "eta_sampled",
    "CERTIFIED", "NOT_CERTIFIED", "MqlfCandidate", "SolverConfig",
    "VerificationReport", "feasibility_probe", "polish_gamma",
    "solve_sampled", "verify_candidate",
    "CapGeometry", "DomainError", "cap_chord", "cap_delta", "cap_geometry",
    "inv_reg_inc_beta", "reg_inc_beta",
    "Csls", "draw_observations", "max_norm_whitebox", "observed_labels",
    "sample_unit_sphere", "simulate", "step",
    "cjsr_lower_bruteforce", "whitebox_candidate", "whitebox_gamma",
    "__version__",
]
