"""Core signal representations and the two primitive transforms.

A signal is a finite, uniformly sampled, real-valued 1-D sequence. Throughout
the library signals travel as plain float64 ndarrays; :class:`Signal` is a
thin carrier that additionally remembers a sample rate for I/O purposes.

The two primitives every Hammerstein stage is built from live here:

* :func:`poly_transform` -- pointwise static polynomial nonlinearity,
* :func:`fir_convolve` / :func:`fir_convolve_fft` -- causal FIR filtering
  with zero initial history.

All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericOverflowError

__all__ = [
    "Signal",
    "as_samples",
    "as_coeffs",
    "poly_transform",
    "fir_convolve",
    "fir_convolve_fft",
]


@dataclass(frozen=True)
class Signal:
    """A finite real 1-D sample sequence with an optional sample rate.

    Parameters
    ----------
    samples : ndarray
        The sample values. Must be finite and non-empty.
    sample_rate : float, optional
        Sampling frequency in Hz. Informational only; no operation depends
        on it.
    """

    samples: np.ndarray
    sample_rate: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "samples", as_samples(self.samples))
        if self.sample_rate is not None and not self.sample_rate > 0:
            raise DataError(f"sample_rate must be positive, got {self.sample_rate}")

    def __len__(self):
        return len(self.samples)


def as_samples(x) -> np.ndarray:
    """Coerce ``x`` to a validated 1-D float64 sample array.

    Accepts array_likes and :class:`Signal`. Raises :class:`DataError` for
    empty or non-1-D input and :class:`NumericOverflowError` for non-finite
    samples.
    """
    if isinstance(x, Signal):
        return x.samples
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise DataError(f"expected a 1-D signal, got shape {arr.shape}")
    if arr.size == 0:
        raise DataError("signal must contain at least one sample")
    if not np.all(np.isfinite(arr)):
        idx = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise NumericOverflowError(f"non-finite sample at index {idx}")
    return arr


def as_coeffs(c, kind: str = "coefficient") -> np.ndarray:
    """Coerce a coefficient sequence (polynomial or FIR taps) to float64."""
    arr = np.asarray(c, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DataError(f"{kind} array must be non-empty and 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        idx = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise NumericOverflowError(f"non-finite {kind} at index {idx}")
    return arr


def _check_finite_output(y: np.ndarray, context: str) -> np.ndarray:
    if not np.all(np.isfinite(y)):
        idx = int(np.flatnonzero(~np.isfinite(y))[0])
        raise NumericOverflowError(f"{context} overflowed at sample index {idx}")
    return y


def poly_transform(x, coeffs) -> np.ndarray:
    """Apply a static polynomial nonlinearity to every sample of ``x``.

    Computes ``z[n] = sum_k coeffs[k] * x[n]**k`` via Horner's scheme.

    Parameters
    ----------
    x : array_like or Signal
        Input samples.
    coeffs : array_like
        Polynomial coefficients, ``coeffs[k]`` multiplying ``x**k``.

    Returns
    -------
    ndarray
        Transformed samples, same length as ``x``.
    """
    x = as_samples(x)
    a = as_coeffs(coeffs, "polynomial coefficient")
    z = np.full_like(x, a[-1])
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(len(a) - 2, -1, -1):
            z = z * x + a[k]
    return _check_finite_output(z, "polynomial evaluation")


def fir_convolve(taps, x) -> np.ndarray:
    """Causal FIR filtering with zero initial history, direct form.

    ``y[n] = sum_{j=0..min(m, n)} taps[j] * x[n-j]``; the output is truncated
    to the input length.

    Parameters
    ----------
    taps : array_like
        FIR coefficients; ``taps[j]`` is the tap at delay ``j``.
    x : array_like or Signal
        Input samples.

    Returns
    -------
    ndarray
        Filtered samples, same length as ``x``.
    """
    b = as_coeffs(taps, "FIR tap")
    x = as_samples(x)
    with np.errstate(over="ignore", invalid="ignore"):
        y = np.convolve(x, b)[: len(x)]
    return _check_finite_output(y, "FIR convolution")


def fir_convolve_fft(taps, x) -> np.ndarray:
    """Causal FIR filtering computed through the FFT.

    Identical contract to :func:`fir_convolve`. Both sequences are
    zero-padded to the next power of two at or above ``len(x) + m`` before
    the spectral multiply, which keeps the circular convolution free of
    wrap-around over the retained samples.
    """
    b = as_coeffs(taps, "FIR tap")
    x = as_samples(x)
    n = len(x)
    size = _next_pow_two(n + len(b) - 1)
    with np.errstate(over="ignore", invalid="ignore"):
        y = np.fft.irfft(np.fft.rfft(x, size) * np.fft.rfft(b, size), size)[:n]
    return _check_finite_output(y, "FIR convolution")


def _next_pow_two(n: int) -> int:
    return 1 << max(int(n) - 1, 1).bit_length()


# Direct convolution wins for short filters; the FFT path wins once the
# tap count grows. The crossover is coarse but the contract is identical.
_FFT_MIN_TAPS = 64
_FFT_MIN_LEN = 1024


def convolve(taps, x) -> np.ndarray:
    """FIR filtering with automatic direct/FFT dispatch."""
    b = as_coeffs(taps, "FIR tap")
    x = as_samples(x)
    if len(b) >= _FFT_MIN_TAPS and len(x) >= _FFT_MIN_LEN:
        return fir_convolve_fft(b, x)
    return fir_convolve(b, x)
