"""Which frequency bands of an eye-movement trace carry signal and which carry noise."""

__version__ = "0.1.0"

from ._accel import backend
from .errors import EyebandError, InputError, NumericalError
from .filters import (
    DEFAULT_BANDS,
    BandSpec,
    FilterSpec,
    FilterStages,
    apply_zero_phase,
    decompose_bands,
    design_filter,
    frequency_response,
)
from .kinematics import (
    SaccadeFeatures,
    detect_saccades,
    extract_snippet,
    saccade_features,
    savgol_derivative_kernel,
    velocity,
)
from .sampling import SamplingSweepResult, estimate_amplitude, min_sampling_rate, sweep_sampling
from .signal import (
    SaccadeEvent,
    SyntheticSaccadeSpec,
    TimeSeries,
    extract_window,
    gen_sine,
    gen_synthetic_saccade,
    validate_series,
)
from .statfit import (
    MainSequenceFit,
    PvafTable,
    TTestResult,
    aggregate_pvaf,
    ci_overlap_report,
    difference_curve,
    fit_exponential,
    fit_power_law,
    incremental_pvaf,
    paired_t_test,
)
