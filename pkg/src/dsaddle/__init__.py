"""dsaddle: saddle-point machinery for Dirichlet series."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .errors import ConvergenceError, DomainError, NoSaddleError, RangeError
from .series import (
    ClosedFormSeries,
    CoefficientSeries,
    EvalReport,
    LogCoefficients,
    Remainder,
    dirichlet_exp,
    dirichlet_log,
    dirichlet_mul,
    estimate_alpha,
    eval_derivatives,
    eval_F,
    eval_F_report,
    eval_H,
    eval_H_delta,
    hat_F,
    partial_sum,
    read_coefficient_file,
    remainder,
    remainder_record,
    write_coefficient_file,
)
from .saddle import (
    EstimateReport,
    RVCheck,
    SaddleSolution,
    estimate_F,
    estimate_hat,
    rv_ratio_check,
    solve_saddle,
)
from .perron import (
    ContourSpec,
    GaussianLemma,
    QuadratureResult,
    gaussian_integral,
    gaussian_quadrature,
    perron_hat,
    split_J,
)
from .admissibility import (
    ConditionReport,
    Witness,
    WitnessedSeries,
    check_A,
    check_A_minus,
    check_corollary_trends,
    check_T,
    classify,
    default_delta,
    product,
    tenenbaum_witness,
)
from . import catalog

__version__ = "0.1.0"
