"""Pseudospectral laboratory for the viscous nonlinear wave equation on the torus.

The equation is the damped wave equation with fractional dissipation and a
power nonlinearity,

    u_tt - Lap(u) + sqrt(-Lap) u_t = -u^k,

studied through its exact Fourier-side propagators, tree-indexed Picard
series, adversarial box-shaped initial data, and parameter planners that
drive norm-inflation, loss-of-regularity, and smoothness-failure
experiments at desk scale.
"""

from .config import DEFAULT, RunConfig, load_config
from .data import (
    AdversarialData,
    BoxSpec,
    background_data,
    build_adversarial,
    build_sigma,
    perturbation_distance,
    zero_sum_tuple_count,
)
from .errors import (
    AccuracyError,
    ConfigurationError,
    DivergenceError,
    RegimeError,
    VnlwError,
)
from .estimates import (
    Thresholds,
    big_i,
    big_i_sum,
    conv_box_oracle,
    exact_time_integral,
    g_s,
    lattice_gs,
    lower_bound_prediction,
    phase_deficit,
    signed_phase,
    thresholds,
    xi1_closed_form,
    xi1_field,
)
from .picard import (
    IterateTrajectory,
    Tree,
    duhamel_Ik,
    enumerate_trees,
    eval_tree,
    fuss_catalan,
    solve_contraction,
    solve_series,
    sum_tree_level,
    xi_iterates,
)
from .regimes import (
    LedgerEntry,
    RegimePlan,
    check_ledger,
    minimum_admissible_N,
    plan_ck_failure,
    plan_long_time,
    plan_short_time,
)
from .spectral import (
    FieldPair,
    FrequencyLattice,
    SpectralField,
    apply_linear_flow,
    field_from_bytes,
    field_from_json,
    field_to_bytes,
    field_to_json,
    fl_norm,
    hs_norm,
    lp_norm,
    multiplier_value,
    pair_fl1_norm,
    pair_sobolev_norm,
    pointwise_power,
    pointwise_product,
    xt_norm,
)

__version__ = "0.1.0"
