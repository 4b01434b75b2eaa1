"""Exact and Monte Carlo verification of decoupling inequalities for U-statistics."""

from ._accel import backend_name
from .chaos import (
    ChaosForm,
    chaos_eval,
    chaos_exact_moments,
    hypercontractivity_report,
    kappa_of,
    lemma2_check,
    proposition1_check,
)
from .coupling import (
    build_coupled_pairs,
    check_identity_8,
    check_identity_9,
    coupling_law_check,
    decomposition_4_check,
    inequality5_check,
    inequality6_check,
    lemma1_tail_check,
    symmetric_reverse_decomposition_check,
    universal_symmetrization_falsifier,
)
from .graph import PointCloudSpec, clustering_D1, clustering_D2, graph_demo
from .model import (
    CallbackKernel,
    ConstantKernel,
    DistanceKernel,
    FiniteDistribution,
    GeneratorDistribution,
    NormSpec,
    PolynomialKernel,
    ProductKernel,
    SampleBlock,
    TableKernel,
    check_kernel_symmetry,
)
from .problab import exact_tail, find_constant, mc_tail, two_sided_comparison
from .suite import run_suite
from .ustat import coupled_sum, decoupled_sum, enumerate_tuples, polarized_sum_Tn, symmetrize_kernel

__version__ = "0.1.0"
