"""Projection pursuit optimization toolkit.

Jellyfish search and creeping random search over orthonormal projection
bases, a suite of projection pursuit index functions, the smoothness and
squintability index diagnostics, and a benchmark harness.
"""

from . import bench, data, glm, indexes, manifold, optimize, smoothness, squint
from .bench import (
    ExperimentDesign,
    RunSummary,
    bootstrap_ci,
    huber_curve,
    run_experiment,
    success_rate,
)
from .data import Dataset, gen_pipe, gen_randu, gen_sine, gen_trimodal, load_csv, save_csv, standardize
from .glm import GlmFit, fit_quasibinomial_glm
from .indexes import IndexFn, available_indexes, registry_lookup
from .manifold import (
    geodesic_interpolate,
    orient_align,
    orthonormalize,
    proj_distance,
    random_basis,
    squint_angle,
)
from .optimize import CrsConfig, JsoConfig, OptRun, crs_run, jso_run, time_control
from .smoothness import (
    MaternParams,
    SmoothnessFit,
    bessel_k,
    fit_smoothness,
    gp_neg_loglik,
    matern_cov,
    sample_bases_smoothness,
)
from .squint import (
    SigmoidParams,
    SquintResult,
    SquintSamples,
    bin_average,
    fit_sigmoid_nls,
    sample_bases_squint,
    squintability_kernel,
    squintability_parametric,
)

__version__ = "0.1.0"
