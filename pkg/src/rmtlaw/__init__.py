"""Limiting spectral moments of sample covariance matrices whose columns
carry Markov-type dependence: predictions, combinatorial oracles, and Monte
Carlo verification."""

from .combinatorics import (
    Composition,
    ConsistentGraph,
    Partition,
    closed_block_view,
    count_nc_by_block_sizes,
    enumerate_compositions,
    enumerate_consistent_graphs,
    enumerate_partitions,
    is_noncrossing,
    kreweras_complement,
    max_component_graphs,
    narayana,
    nc_partitions,
)
from .errors import (
    BoundError,
    BudgetError,
    DomainError,
    NumericError,
    ParseError,
    RmtlawError,
    UnsupportedModelError,
)
from .models import (
    DecayReport,
    FiniteMarkovChain,
    GaussianAR1,
    IIDSymmetric,
    TwoStateChain,
    as_finite_chain,
    autocovariances,
    chain_joint_moment,
    check_product_decay,
    covariance_matrix,
    decay_rate,
    h_finite,
    h_szego,
    isserlis_moment,
    model_text,
    parse_model,
    sample_path,
    sample_paths,
    spectral_density,
)
from .moments import (
    AspectRatio,
    HSequence,
    QSequence,
    limiting_moment,
    limiting_moment_via_nc,
    mp_moment,
    qform_moment,
)
from .montecarlo import (
    Histogram,
    MomentReport,
    MomentRow,
    SimConfig,
    SpectrumSample,
    eigenvalue_histogram,
    replicate_stream,
    run_monte_carlo,
    sample_matrix,
    sample_spectra,
    spectral_moments,
)

__version__ = "0.1.0"

__all__ = [
    "AspectRatio",
    "BoundError",
    "BudgetError",
    "Composition",
    "ConsistentGraph",
    "DecayReport",
    "DomainError",
    "FiniteMarkovChain",
    "GaussianAR1",
    "HSequence",
    "Histogram",
    "IIDSymmetric",
    "MomentReport",
    "MomentRow",
    "NumericError",
    "ParseError",
    "Partition",
    "QSequence",
    "RmtlawError",
    "SimConfig",
    "SpectrumSample",
    "TwoStateChain",
    "UnsupportedModelError",
    "as_finite_chain",
    "autocovariances",
    "chain_joint_moment",
    "check_product_decay",
    "closed_block_view",
    "count_nc_by_block_sizes",
    "covariance_matrix",
    "decay_rate",
    "eigenvalue_histogram",
    "enumerate_compositions",
    "enumerate_consistent_graphs",
    "enumerate_partitions",
    "h_finite",
    "h_szego",
    "is_noncrossing",
    "isserlis_moment",
    "kreweras_complement",
    "limiting_moment",
    "limiting_moment_via_nc",
    "max_component_graphs",
    "model_text",
    "mp_moment",
    "narayana",
    "nc_partitions",
    "parse_model",
    "qform_moment",
    "replicate_stream",
    "run_monte_carlo",
    "sample_matrix",
    "sample_path",
    "sample_paths",
    "sample_spectra",
    "spectral_density",
    "spectral_moments",
]
