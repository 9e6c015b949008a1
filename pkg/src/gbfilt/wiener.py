"""Closed-form least-squares FIR estimation (Wiener-Hopf normal equations).

Given a filter input ``x`` and a desired output ``target`` of equal length,
:func:`solve_time_domain` and :func:`solve_frequency_domain` return the
causal FIR filter of a requested order that minimizes

    sum_n (target[n] - sum_j b[j] * x[n-j])**2  +  ridge * ||b||**2

over the full sample range, with zero history before the first sample. The
correlation statistics entering the normal equations are biased (1/N)
sample averages. The two solvers differ only in how those correlations are
estimated (direct sums vs. FFT); they assemble and solve the same
symmetric positive-semidefinite system and agree to near machine precision.

:func:`residual_orthogonality` exposes the normal-equations optimality
condition as a diagnostic: the least-squares residual is uncorrelated with
every delayed copy of the input, so a second linear stage fed the same
input cannot improve the fit.

All functions are pure; concurrent calls are safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DataError, SingularSystemError
from .signals import as_samples, fir_convolve

__all__ = [
    "WienerHopfProblem",
    "solve_time_domain",
    "solve_frequency_domain",
    "solve",
    "residual_orthogonality",
]

#: Scale factor for the automatic ridge chosen when ``ridge=None``:
#: ``1e-8`` times the mean diagonal of the normal matrix.
AUTO_RIDGE_SCALE = 1e-8


@dataclass(frozen=True)
class WienerHopfProblem:
    """One FIR estimation problem.

    Parameters
    ----------
    x : array_like or Signal
        Filter input samples.
    target : array_like or Signal
        Desired filter output, same length as ``x``.
    order : int
        Filter order; the filter has ``order + 1`` taps.
    ridge : float or None
        Tikhonov regularization strength added to the normalized normal
        matrix diagonal. ``0.0`` gives the exact least-squares solution;
        ``None`` (default) selects a conservative automatic value of
        ``1e-8`` times the mean diagonal, which keeps long, nearly
        singular problems solvable.
    """

    x: np.ndarray
    target: np.ndarray
    order: int
    ridge: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "x", as_samples(self.x))
        object.__setattr__(self, "target", as_samples(self.target))
        if len(self.x) != len(self.target):
            raise DataError(
                f"input and target lengths differ: {len(self.x)} vs {len(self.target)}"
            )
        if self.order < 0:
            raise DataError(f"filter order must be >= 0, got {self.order}")
        if len(self.x) <= self.order:
            raise DataError(
                f"need more samples than taps: {len(self.x)} samples for order {self.order}"
            )
        if self.ridge is not None and self.ridge < 0:
            raise DataError(f"ridge must be >= 0, got {self.ridge}")


def _corr_direct(a: np.ndarray, b: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased correlations sum_n a[n] * b[n-lag] for lag = 0..max_lag."""
    n = len(a)
    return np.array([a[lag:] @ b[: n - lag] for lag in range(max_lag + 1)])


def _corr_fft(a: np.ndarray, b: np.ndarray, max_lag: int) -> np.ndarray:
    """Same correlations as :func:`_corr_direct`, via zero-padded FFT.

    The pad length >= n + max_lag keeps the circular correlation alias-free
    over the retained lags.
    """
    n = len(a)
    size = 1 << (n + max_lag).bit_length()
    spec = np.fft.rfft(a, size) * np.fft.rfft(b, size).conj()
    return np.fft.irfft(spec, size)[: max_lag + 1]


def _tail_gram(x: np.ndarray, order: int) -> np.ndarray:
    """Correction between the zero-padded Toeplitz Gram matrix and the
    exact prewindowed one.

    The zero-padded correlation sums run past the last sample; entry (j, k)
    of this matrix removes the ``min(j, k)`` spurious products formed from
    the final ``order`` samples. Assembled diagonal by diagonal with
    cumulative sums, O(order**2) total.
    """
    m = order
    e = np.zeros((m + 1, m + 1))
    if m == 0:
        return e
    v = x[::-1][:m]
    for d in range(m):
        cum = np.cumsum(v[: m - d] * v[d:m])
        j = np.arange(1, m - d + 1)
        e[j, j + d] = cum
        e[j + d, j] = cum
    return e


def _normal_equations(prob: WienerHopfProblem, use_fft: bool):
    """Assemble the normalized normal matrix and cross vector."""
    x, t, m = prob.x, prob.target, prob.order
    n = len(x)
    corr = _corr_fft if use_fft else _corr_direct
    autocorr = corr(x, x, m)
    cross = corr(t, x, m)
    gram = (scipy.linalg.toeplitz(autocorr) - _tail_gram(x, m)) / n
    return gram, cross / n


def _solve_system(gram: np.ndarray, cross: np.ndarray, ridge: float | None) -> np.ndarray:
    if ridge is None:
        ridge = AUTO_RIDGE_SCALE * np.trace(gram) / len(gram)
    a = gram + ridge * np.eye(len(gram))
    try:
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(a), cross)
    except scipy.linalg.LinAlgError:
        pass
    # Cholesky can reject a semidefinite matrix that a pivoted symmetric
    # factorization still handles.
    try:
        return scipy.linalg.solve(a, cross, assume_a="sym")
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystemError(
            "normal equations are singular; the filter input carries too "
            "little excitation for the requested order. Set ridge > 0 to "
            "regularize."
        ) from exc


def solve_time_domain(prob: WienerHopfProblem) -> np.ndarray:
    """Solve the normal equations with directly estimated correlations.

    Returns
    -------
    ndarray
        Optimal FIR taps, length ``prob.order + 1``.

    Raises
    ------
    SingularSystemError
        If the system is singular and ``ridge`` is 0.
    """
    gram, cross = _normal_equations(prob, use_fft=False)
    return _solve_system(gram, cross, prob.ridge)


def solve_frequency_domain(prob: WienerHopfProblem) -> np.ndarray:
    """Solve the normal equations with FFT-estimated correlations.

    Same contract as :func:`solve_time_domain`; the FFT estimates the
    correlations as a convolution with the time-reversed input, zero-padded
    to avoid circular wrap-around. Coefficients agree with the time-domain
    solver to well within 1e-7 relative.
    """
    gram, cross = _normal_equations(prob, use_fft=True)
    return _solve_system(gram, cross, prob.ridge)


def solve(prob: WienerHopfProblem, method: str = "auto") -> np.ndarray:
    """Dispatch to a solver: ``"time"``, ``"freq"``, or ``"auto"``.

    ``"auto"`` picks the FFT path once the correlation work is large enough
    to pay for it.
    """
    if method == "time":
        return solve_time_domain(prob)
    if method == "freq":
        return solve_frequency_domain(prob)
    if method != "auto":
        raise DataError(f"unknown solver method {method!r}")
    use_fft = prob.order >= 128 and len(prob.x) >= 2048
    gram, cross = _normal_equations(prob, use_fft=use_fft)
    return _solve_system(gram, cross, prob.ridge)


def residual_orthogonality(prob: WienerHopfProblem, taps) -> float:
    """Largest normalized correlation between the fit residual and the
    delayed input.

    Returns ``max_j |sum_n r[n] x[n-j]| / (||r|| ||x||)`` for
    ``r = target - fir_convolve(taps, x)`` and ``j = 0..order``. For the
    exact least-squares solution this is at numerical-noise level; ridge
    regularization or an unoptimized filter leaves it large. Returns 0 by
    convention when either norm vanishes.
    """
    r = prob.target - fir_convolve(taps, prob.x)
    norm = np.linalg.norm(r) * np.linalg.norm(prob.x)
    if norm == 0.0:
        return 0.0
    corr = _corr_direct(r, prob.x, prob.order)
    return float(np.abs(corr).max() / norm)
