"""First-order optimizer pieces used by the trainers.

The optimizer is AdamW with decoupled weight decay: the decay term scales
the parameter directly instead of entering the gradient moments. State is
held in a plain dataclass and every update returns new arrays, which keeps
the trainers easy to checkpoint and test.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericOverflowError

__all__ = ["AdamState", "adam_step", "one_cycle_lr"]


@dataclass
class AdamState:
    """Moment estimates and step counter for one parameter vector."""

    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, size: int) -> "AdamState":
        return cls(m=np.zeros(size), v=np.zeros(size))


def adam_step(
    params: np.ndarray,
    grad: np.ndarray,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    weight_decay: float = 0.0,
) -> tuple[np.ndarray, AdamState]:
    """One AdamW update. Returns the new parameters and state.

    Moments use the standard bias correction. Weight decay is decoupled:
    ``params -= lr * weight_decay * params`` on top of the Adam direction.
    """
    grad = np.asarray(grad, dtype=np.float64)
    if not np.all(np.isfinite(grad)):
        bad = int(np.flatnonzero(~np.isfinite(grad))[0])
        raise NumericOverflowError(
            f"non-finite gradient at parameter index {bad}"
        )
    t = state.step + 1
    m = beta1 * state.m + (1.0 - beta1) * grad
    v = beta2 * state.v + (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    update = m_hat / (np.sqrt(v_hat) + eps) + weight_decay * params
    return params - lr * update, AdamState(m=m, v=v, step=t)


def one_cycle_lr(
    step: int,
    total_steps: int,
    max_lr: float,
    pct_start: float = 0.3,
    div_factor: float = 25.0,
    final_div_factor: float = 1e4,
) -> float:
    """Learning rate for ``step`` (0-based) under a one-cycle schedule.

    Cosine warmup from ``max_lr / div_factor`` up to ``max_lr`` over the
    first ``pct_start`` fraction of ``total_steps``, then cosine annealing
    down to ``max_lr / final_div_factor``. The long decay tail is what
    lets a quadratic-in-parameters fit settle to near machine precision.
    """
    if total_steps <= 1:
        return max_lr
    warm = max(1, int(round(pct_start * total_steps)))
    lo = max_lr / div_factor
    end = max_lr / final_div_factor
    if step < warm:
        frac = step / warm
        return lo + (max_lr - lo) * 0.5 * (1.0 - np.cos(np.pi * frac))
    frac = (step - warm) / max(1, total_steps - warm)
    frac = min(frac, 1.0)
    return end + (max_lr - end) * 0.5 * (1.0 + np.cos(np.pi * frac))
