"""Gradient boosted filters: cascades of Hammerstein weak learners.

Each stage applies a learned static polynomial to the input and filters
the result with a least-squares-optimal FIR filter; stages are fit to the
running residual, boosting style, and the model output is the sum of the
stage outputs. See the README for the method walkthrough and the
``gbfilt`` command-line tool.
"""

from .bench import (
    SyntheticHammerstein,
    default_hammerstein,
    generate_hammerstein,
    make_chirp_scene,
    make_example1_datasets,
    simulate_example1,
)
from .errors import (
    ConfigError,
    DataError,
    DivergenceError,
    GbfiltError,
    ModelFormatError,
    NumericOverflowError,
    SingularSystemError,
)
from .metrics import mse, nmse
from .model import (
    GbfModel,
    HammersteinStage,
    load_model,
    model_forward,
    save_model,
    stage_forward,
)
from .signals import Signal, fir_convolve, fir_convolve_fft, poly_transform
from .train import (
    TrainConfig,
    TrainReport,
    poly_loss_gradient,
    train,
    train_combined,
    train_separate,
)
from .wiener import (
    WienerHopfProblem,
    residual_orthogonality,
    solve_frequency_domain,
    solve_time_domain,
)

__version__ = "0.1.0"

__all__ = [
    "Signal",
    "poly_transform",
    "fir_convolve",
    "fir_convolve_fft",
    "WienerHopfProblem",
    "solve_time_domain",
    "solve_frequency_domain",
    "residual_orthogonality",
    "HammersteinStage",
    "GbfModel",
    "stage_forward",
    "model_forward",
    "save_model",
    "load_model",
    "TrainConfig",
    "TrainReport",
    "train",
    "train_separate",
    "train_combined",
    "poly_loss_gradient",
    "mse",
    "nmse",
    "simulate_example1",
    "make_example1_datasets",
    "SyntheticHammerstein",
    "default_hammerstein",
    "generate_hammerstein",
    "make_chirp_scene",
    "GbfiltError",
    "ConfigError",
    "DataError",
    "NumericOverflowError",
    "SingularSystemError",
    "DivergenceError",
    "ModelFormatError",
    "__version__",
]
