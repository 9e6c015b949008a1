"""Reference systems and dataset generators for benchmarks and tests.

Three families:

* ``simulate_example1`` / ``make_example1_datasets``: a first-order
  nonlinear recursion driven by i.i.d. uniform inputs, with train,
  validation, and test splits drawn from successively wider ranges so the
  test split probes out-of-range generalization.
* ``SyntheticHammerstein`` / ``generate_hammerstein``: ground-truth
  polynomial-plus-FIR cascades for identification experiments where the
  right answer is known.
* ``make_chirp_scene``: a synthetic "speaker and room" measurement, a
  chirp sequence played through a soft clipper, a random reverberant
  impulse response, and additive noise. All pipeline constants are fixed
  here so results are reproducible per seed.

Everything is deterministic given the seed; generators never touch global
RNG state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.signal

from .errors import DataError
from .model import GbfModel, HammersteinStage, stage_forward
from .signals import Signal, as_coeffs, as_samples

__all__ = [
    "simulate_example1",
    "make_example1_datasets",
    "SyntheticHammerstein",
    "default_hammerstein",
    "generate_hammerstein",
    "make_chirp_scene",
    "CHIRP_SAMPLE_RATE",
    "CHIRP_TRAIN_SPLIT",
]

# Chirp-scene geometry: seven blocks of silence followed by a linear
# chirp sweep, at a fixed audio rate. The first six blocks are the
# conventional training region; the last block is held out.
CHIRP_SAMPLE_RATE = 16000.0
CHIRP_BLOCKS = 7
CHIRP_GAP = 400
CHIRP_SAMPLES = 1600
CHIRP_F0 = 100.0
CHIRP_F1 = 7000.0
CHIRP_TRAIN_SPLIT = (CHIRP_BLOCKS - 1) * (CHIRP_GAP + CHIRP_SAMPLES)

#: Exponential decay constant (in samples) of the synthetic room response.
RIR_DECAY = 230.0


def simulate_example1(u) -> np.ndarray:
    """First-order nonlinear system response.

    State recursion ``x(n+1) = 0.5 x(n) + u(n) + 0.1 u(n)**2`` from
    ``x(0) = 0``; the observed target is the state itself, so the output
    at each step reflects only earlier inputs.
    """
    u = as_samples(u)
    t = np.empty_like(u)
    x = 0.0
    for n in range(len(u)):
        t[n] = x
        x = 0.5 * x + u[n] + 0.1 * u[n] * u[n]
    return t


def make_example1_datasets(
    seed: int,
    n_train: int = 200,
    n_val: int = 200,
    n_test: int = 200,
    ranges=((-1.0, 1.0), (-2.0, 2.0), (-4.0, 4.0)),
):
    """Train/validation/test splits for the example-1 system.

    Inputs are i.i.d. uniform draws from the per-split ranges (train,
    validation, test in that order); targets come from
    :func:`simulate_example1`. Returns three ``(u, t)`` pairs of arrays.
    """
    if len(ranges) != 3:
        raise DataError(f"expected 3 ranges (train, val, test), got {len(ranges)}")
    sizes = (n_train, n_val, n_test)
    for n in sizes:
        if n < 1:
            raise DataError(f"split sizes must be >= 1, got {sizes}")
    rng = np.random.default_rng(seed)
    out = []
    for n, (lo, hi) in zip(sizes, ranges):
        lo, hi = float(lo), float(hi)
        if not (np.isfinite(lo) and np.isfinite(hi)) or hi < lo:
            raise DataError(f"bad input range ({lo}, {hi})")
        u = rng.uniform(lo, hi, n)
        out.append((u, simulate_example1(u)))
    return tuple(out)


@dataclass(frozen=True)
class SyntheticHammerstein:
    """Ground-truth cascade: (poly, fir) pairs plus a noise level."""

    stages: tuple[tuple[np.ndarray, np.ndarray], ...]
    noise: float = 0.0

    def __post_init__(self):
        stages = tuple(
            (
                as_coeffs(poly, "polynomial coefficient"),
                as_coeffs(fir, "FIR tap"),
            )
            for poly, fir in self.stages
        )
        if not stages:
            raise DataError("a synthetic system needs at least one stage")
        object.__setattr__(self, "stages", stages)
        if not self.noise >= 0:
            raise DataError(f"noise level must be >= 0, got {self.noise}")

    def as_model(self) -> GbfModel:
        """The same cascade as a forward-evaluable model."""
        return GbfModel(
            stages=tuple(
                HammersteinStage(poly=poly, fir=fir) for poly, fir in self.stages
            )
        )


def default_hammerstein(noise: float = 0.0) -> SyntheticHammerstein:
    """The stock two-stage system used by tests and the CLI generator.

    Stage one is linear with a short decaying filter; stage two applies
    the third Hermite polynomial ``x**3 - 3x`` (scaled) through a two-tap
    filter. For standard normal input the Hermite part is uncorrelated
    with everything a linear first stage can produce, so a greedy
    stage-by-stage fit of a (1,2)+(3,1) model recovers the true cascade
    instead of a smeared compromise. That makes this system a clean
    identification oracle: the exact solution exists and is reachable.
    """
    return SyntheticHammerstein(
        stages=(
            (np.array([0.0, 1.0]), np.array([1.0, 0.5, 0.25])),
            (np.array([0.0, -1.05, 0.0, 0.35]), np.array([0.6, -0.3])),
        ),
        noise=noise,
    )


def generate_hammerstein(sys: SyntheticHammerstein, x, seed: int = 0) -> np.ndarray:
    """Noisy response of a ground-truth cascade to input ``x``.

    The clean part is the sum of the stage outputs; Gaussian noise with
    standard deviation ``sys.noise`` is added on top, drawn from
    ``default_rng(seed)``.
    """
    x = as_samples(x)
    y = np.zeros_like(x)
    for poly, fir in sys.stages:
        y += stage_forward(HammersteinStage(poly=poly, fir=fir), x)
    if sys.noise > 0:
        rng = np.random.default_rng(seed)
        y = y + rng.normal(0.0, sys.noise, len(x))
    return y


def _chirp_reference(amplitude: float) -> np.ndarray:
    """Seven silence-then-sweep blocks at the module sample rate."""
    t = np.arange(CHIRP_SAMPLES) / CHIRP_SAMPLE_RATE
    sweep = amplitude * scipy.signal.chirp(
        t, f0=CHIRP_F0, t1=CHIRP_SAMPLES / CHIRP_SAMPLE_RATE, f1=CHIRP_F1
    )
    block = np.concatenate([np.zeros(CHIRP_GAP), sweep])
    return np.tile(block, CHIRP_BLOCKS)


def make_chirp_scene(
    seed: int,
    amplitude: float = 0.95,
    clip_drive: float = 1.6,
    rir_length: int = 1600,
    snr_db: float = 40.0,
) -> tuple[Signal, Signal]:
    """Synthetic loudspeaker-in-a-room measurement.

    The reference signal is seven chirp blocks (see the module constants).
    The recorded signal is the reference pushed through, in order:

    1. a memoryless soft clipper ``tanh(clip_drive * x) / clip_drive``
       (unit gain for small signals; ``clip_drive=0`` disables clipping);
    2. a random room impulse response: a unit direct path followed by
       Gaussian echoes with an exponential decay envelope, normalized to
       unit energy (``rir_length=1`` gives the identity response);
    3. white Gaussian noise at ``snr_db`` below the clean recording (when
       the clean recording is silent, the noise falls back to the same
       level below unit power).

    Returns ``(reference, recorded)`` as signals at 16 kHz, deterministic
    per seed.
    """
    if rir_length < 1:
        raise DataError(f"rir_length must be >= 1, got {rir_length}")
    if clip_drive < 0:
        raise DataError(f"clip_drive must be >= 0, got {clip_drive}")
    reference = _chirp_reference(amplitude)
    if clip_drive > 0:
        driven = np.tanh(clip_drive * reference) / clip_drive
    else:
        driven = reference.copy()

    rng = np.random.default_rng(seed)
    rir = np.zeros(rir_length)
    rir[0] = 1.0
    if rir_length > 1:
        lags = np.arange(1, rir_length)
        rir[1:] = rng.normal(0.0, 1.0, rir_length - 1) * np.exp(-lags / RIR_DECAY)
    rir /= np.linalg.norm(rir)
    clean = np.convolve(driven, rir)[: len(driven)]

    rms = float(np.sqrt(clean @ clean / len(clean)))
    sigma = (rms if rms > 0 else 1.0) * 10.0 ** (-snr_db / 20.0)
    recorded = clean + rng.normal(0.0, sigma, len(clean))
    return (
        Signal(reference, sample_rate=CHIRP_SAMPLE_RATE),
        Signal(recorded, sample_rate=CHIRP_SAMPLE_RATE),
    )
