"""Random c-Luroth transformations: expansions, orbit classification, exact densities, statistics."""
from .core import (
    ExpansionRecord,
    OmegaSource,
    Params,
    SignDigit,
    alt_map,
    branch_map,
    convergent,
    critical_points,
    digit_of,
    expand,
    k_step,
    luroth_map,
    psi_limit,
    psi_periodic,
    psi_prefix,
    sign_digit,
    switch_contains,
    theta_value,
)
from .errors import (
    CapExceededError,
    DomainError,
    NonMarkovPartitionError,
    NonUniqueDensityError,
    OmegaExhaustedError,
)
from .markov import (
    digit_frequencies,
    lyapunov_exact,
    markov_points,
    stationary_density,
    transfer_matrix,
)
from .orbits import (
    build_orbit_graph,
    classify,
    deterministic_avoids_switch,
    enumerate_expansions,
    enumerate_loop_classes,
    to_dot,
)
from .stats import (
    Engine,
    SimConfig,
    StatReport,
    block_coverage,
    convergence_rate_mc,
    digit_freq_mc,
    f_A,
    f_L,
    f_theta,
    luroth_series_lyapunov,
    lyapunov_mc,
    m_p,
    switch_hitting_mc,
    theta_stats_mc,
)

__version__ = "0.1.0"
