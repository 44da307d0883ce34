"""Time-elastic kernel averaging for time series.

A regularized dynamic time warping kernel, its forward/backward
alignment probabilities, and an iterative agglomerative procedure that
averages a set of series in both value and time.  Ships with classic
baselines (DBA, medoid, Euclidean mean), synthetic generators, and a
small evaluation harness for classification and denoising studies.
"""

__version__ = "0.1.0"

from .automata import (
    AlignmentMatrices,
    backward,
    forward,
    posterior,
    row_conditionals,
    write_posterior_csv,
    write_posterior_pgm,
)
from .averaging import (
    METHODS,
    AveragingConfig,
    compute_centroid,
    dba,
    euclidean_centroid,
    medoid,
    pair_expectations,
    teka,
    teka_centroid,
    teka_update,
    write_centroid_csv,
    write_trace_json,
)
from .core import (
    Centroid,
    LabeledDataset,
    TimeSeries,
    parse_multivariate_csv,
    parse_ucr,
    resample_uniform,
    write_dataset,
)
from .datagen import CbfSpec, RosetteSpec, gen_cbf, gen_rosette
from .elastic import (
    KdtwParams,
    KdtwValue,
    WarpPath,
    dtw,
    gram,
    kdtw,
    pairwise_dtw_average,
)
from .errors import (
    ConfigError,
    DegenerateAlignmentError,
    DegenerateTimeError,
    InputError,
    KernelUnderflowError,
    NumericError,
    ParseError,
    TekaError,
)
from .evaluation import (
    DEFAULT_NU_GRID,
    EvalReport,
    LooResult,
    build_prototypes,
    centroid_support,
    classify_1nc,
    default_measure,
    denoise_rosette,
    loo_select_nu,
    power_spectrum,
    report_to_dict,
    snr_gain,
    spectrum_frequencies,
    support_bounds,
    write_report_csv,
    write_report_json,
)

__all__ = [
    "AlignmentMatrices",
    "AveragingConfig",
    "CbfSpec",
    "Centroid",
    "ConfigError",
    "DEFAULT_NU_GRID",
    "DegenerateAlignmentError",
    "DegenerateTimeError",
    "EvalReport",
    "InputError",
    "KdtwParams",
    "KdtwValue",
    "KernelUnderflowError",
    "LabeledDataset",
    "LooResult",
    "METHODS",
    "NumericError",
    "ParseError",
    "RosetteSpec",
    "TekaError",
    "TimeSeries",
    "WarpPath",
    "backward",
    "build_prototypes",
    "centroid_support",
    "classify_1nc",
    "compute_centroid",
    "dba",
    "default_measure",
    "denoise_rosette",
    "dtw",
    "euclidean_centroid",
    "forward",
    "gen_cbf",
    "gen_rosette",
    "gram",
    "kdtw",
    "loo_select_nu",
    "medoid",
    "pair_expectations",
    "pairwise_dtw_average",
    "parse_multivariate_csv",
    "parse_ucr",
    "posterior",
    "power_spectrum",
    "report_to_dict",
    "resample_uniform",
    "row_conditionals",
    "snr_gain",
    "spectrum_frequencies",
    "support_bounds",
    "teka",
    "teka_centroid",
    "teka_update",
    "write_centroid_csv",
    "write_dataset",
    "write_posterior_csv",
    "write_posterior_pgm",
    "write_report_csv",
    "write_report_json",
    "write_trace_json",
]
