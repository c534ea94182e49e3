"""Clustering of input/output time series by generating-system dynamics.

The package couples an extended cepstral distance (computed from Welch
power-spectral-density estimates of each pair's input and output) with
baseline measures, an RLC-circuit data generator, agglomerative
clustering, and a seeded benchmark harness.
"""

from .errors import (
    AcceptanceFailure,
    CepclustError,
    ConfigError,
    DataFormatError,
    DiscretizationSingularityError,
    DivergenceError,
    IncompatibleLengthError,
    IncompatibleModelError,
    InfeasibleBandError,
    LengthError,
    UnboundedNormError,
    UsageError,
    ValidationError,
)
from .signals import (
    IOPair,
    LabeledDataset,
    TimeSeries,
    build_labeled_dataset,
    draw_input_model,
    gen_lti_filtered_input,
    gen_multisine,
    gen_white_noise,
    load_dataset,
    make_rng,
    save_dataset,
)
from .spectral import (
    Cepstrum,
    PowerSpectrum,
    WelchConfig,
    default_config,
    default_segment_length,
    fft,
    power_cepstrum,
    welch_psd,
)
from .distances import (
    DtwConfig,
    cepstral_distance,
    cepstral_norm,
    d_dtw_exact,
    d_euclidean,
    extended_cepstral_distance,
    keogh_envelope,
    lb_keogh,
    pair_system_cepstrum,
    weighted_quefrency_gap,
)
from .lti import (
    CircuitComponents,
    ContinuousStateSpace,
    S1_COMPONENTS,
    S2_COMPONENTS,
    StateSpace,
    circuit_model,
    discretize,
    h2_norm,
    hinf_norm,
    load_model,
    model_distance,
    save_model,
    simulate,
)
from .clustering import (
    Dendrogram,
    DistanceMatrix,
    Partition,
    cut,
    hierarchical_cluster,
    load_matrix,
    load_partition,
    pairwise_matrix,
    save_matrix,
    save_partition,
)
from .evaluation import (
    ExperimentConfig,
    ExperimentReport,
    MEASURES,
    adjusted_rand_index,
    circuit_systems,
    make_measure,
    preset_config,
    report_checks,
    run_experiment,
    timing_scaling_check,
)

__version__ = "0.1.0"
