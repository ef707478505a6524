"""fracvol: fractal cross-correlation features, chaotic oscillator
activations, and a small volatility forecasting harness.

The heavy kernels (segment detrending, oscillator trajectories) run on a
compiled extension when available and on a NumPy twin otherwise; set
FRACVOL_PURE_PYTHON=1 to force the fallback. See fracvol.backend.
"""

from .backend import backend_name
from .errors import FracvolError
from .forecaster import (
    Metrics,
    ModelSpec,
    SupervisedDataset,
    build_dataset,
    evaluate,
    metrics_from_predictions,
    predict,
    run_ablation,
    train,
)
from .fractal import (
    FractalConfig,
    FluctuationRow,
    HurstTriple,
    default_scale_grid,
    mf_adcca,
    rolling_hurst_features,
    rolling_window_count,
)
from .market import (
    DailySeries,
    IntradayDay,
    MinMaxScaler,
    bipower_variation,
    daily_features,
    log_returns,
    minmax_apply,
    minmax_fit,
    minmax_inverse,
    realized_volatility,
    volatility_increment,
)
from .oscillator import (
    MetaActivationLUT,
    OscillatorParams,
    bifurcation_diagram,
    build_lut,
    builtin_library,
    builtin_params,
    generate_meta_activations,
    lut_activation,
    lut_activation_batch,
    max_select,
    meta_activation,
    run_oscillator,
)
from .synthetic import gen_asymmetric_vol, gen_fgn, gen_garch_intraday

__version__ = "0.1.0"

__all__ = [
    "FracvolError",
    "backend_name",
    "__version__",
    # fractal
    "FractalConfig",
    "FluctuationRow",
    "HurstTriple",
    "default_scale_grid",
    "mf_adcca",
    "rolling_hurst_features",
    "rolling_window_count",
    # oscillator
    "MetaActivationLUT",
    "OscillatorParams",
    "bifurcation_diagram",
    "build_lut",
    "builtin_library",
    "builtin_params",
    "generate_meta_activations",
    "lut_activation",
    "lut_activation_batch",
    "max_select",
    "meta_activation",
    "run_oscillator",
    # market
    "DailySeries",
    "IntradayDay",
    "MinMaxScaler",
    "bipower_variation",
    "daily_features",
    "log_returns",
    "minmax_apply",
    "minmax_fit",
    "minmax_inverse",
    "realized_volatility",
    "volatility_increment",
    # synthetic
    "gen_asymmetric_vol",
    "gen_fgn",
    "gen_garch_intraday",
    # forecaster
    "Metrics",
    "ModelSpec",
    "SupervisedDataset",
    "build_dataset",
    "evaluate",
    "metrics_from_predictions",
    "predict",
    "run_ablation",
    "train",
]
