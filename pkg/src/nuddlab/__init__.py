"""nuddlab: nested Uhrig dynamical decoupling at configurable precision.

Layers of the package, innermost out:

  mpcore        precision context, scalars, dense complex linear algebra
  schedule      nested pulse timings, intervals, modulation functions
  errortypes    MOOS validation, error-type partition, Z2^ell algebra
  coefficients  nested-integral coefficients, order predictor, lemma checks
  simulator     multi-qubit + spin-bath evolution and performance measures
  cli           sweeps, log-log order fits, tables, command-line entry
"""

__version__ = "0.1.0"

from .mpcore import (  # noqa: F401
    CMatrix,
    Norms,
    get_precision,
    hermitian_eig,
    identity,
    kron,
    matmul,
    norms,
    partial_trace_system,
    precision,
    set_precision,
    singular_values,
    tol,
    zeros,
)
from .schedule import (  # noqa: F401
    NuddSpec,
    Timeline,
    build_timeline,
    min_pulse_interval,
    modulation,
    nudd_timing,
    udd_fractions,
    udd_intervals,
)
from .errortypes import (  # noqa: F401
    MIXED,
    ErrorDecomposition,
    Moos,
    MoosError,
    classify,
    generator_table,
    partition,
    pauli,
    pauli_string,
    validate_moos,
    xor,
)
from .coefficients import (  # noqa: F401
    BudgetExceeded,
    coefficient,
    fourier_profile,
    lemma_checks,
    naive_order,
    oracle_coefficient,
    outer_decomposition,
    predict_order,
    predict_overall,
    suppression_orders,
    vanishing_order,
)
from .simulator import (  # noqa: F401
    BathSpec,
    EvolutionPlan,
    ModelHamiltonian,
    assemble_hamiltonian,
    build_bath_operator,
    distance_D,
    error_measure_E,
    evolve,
    preset_moos,
)
