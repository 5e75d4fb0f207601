"""Sparse-residual autoregressive estimation.

Robust AR fitting by graduated IRLS on a bounded residual cost, AR power
spectra with a missing-data experiment, and residual clip/quantize coding.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateSignal,
    InvalidConfig,
    InvalidFraction,
    InvalidOrder,
    InvalidSigma,
    NonConvergence,
    OrderTooLarge,
    OutOfRange,
    ParseError,
    SeriesIOError,
    SingularSystem,
    SparseARError,
    TooLarge,
    UnstableModel,
    UnsupportedFormat,
)
from .signal import (  # noqa: E402
    MissingMask,
    TimeSeries,
    apply_missing,
    frame_split,
    gen_ar_process,
    gen_speech_like,
    gen_two_sinusoids,
)
from .regression import (  # noqa: E402
    ARModel,
    DesignSystem,
    RobustConfig,
    build_design,
    fit,
    l0_bruteforce,
    l1_fit,
    ols_fit,
    robust_fit,
    weighted_ls_solve,
    yule_walker_fit,
)
from .spectral import SpectrumGrid, Table1Config, ar_spectrum, run_table1, spectrum_correlation  # noqa: E402
from .coding import (  # noqa: E402
    ClipSpec,
    CodingReport,
    PipelineConfig,
    QuantizerSpec,
    clip_residual,
    code_frames,
    delta_entropy,
    empirical_entropy,
    sweep_k,
    uniform_quantize,
)
from .io import read_series  # noqa: E402
