"""Boosted training of Hammerstein filter cascades.

Two training modes share the same stage machinery:

``train_separate``
    Stages are fit one at a time. A stage alternates a closed-form
    least-squares FIR solve with a gradient step on its polynomial until
    the stage loss settles, then the stage is frozen and the next stage
    fits what is left of the target.

``train_combined``
    Every epoch runs the whole cascade (each stage gets a fresh
    least-squares FIR against the running residual), then takes one
    joint gradient step on all polynomials at once.

In both modes the FIR solve is treated as a constant during
backpropagation; only polynomial coefficients receive gradients, and the
filter is re-solved from scratch after every polynomial update. Gradients
therefore never need to differentiate through a matrix solve, and each
stage's recorded loss is always the loss of a consistent
(polynomial, filter) pair.

Because every stage ends on a least-squares-optimal filter, a stage can
never do worse than the zero filter, so the per-stage MSE sequence is
non-increasing by construction in both modes.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError, DataError, DivergenceError, NumericOverflowError
from .model import GbfModel, HammersteinStage
from .optim import AdamState, adam_step, one_cycle_lr
from .signals import as_coeffs, as_samples, convolve, poly_transform
from .wiener import WienerHopfProblem, solve

__all__ = [
    "TrainConfig",
    "TrainReport",
    "poly_loss_gradient",
    "train",
    "train_separate",
    "train_combined",
]

#: Half-width of the uniform perturbation applied to x**2-and-up terms
#: under the default "identity" polynomial initialization.
INIT_JITTER = 1e-3

#: The divergence guard compares the loss against its starting value, which
#: is meaningless when the starting fit is already at rounding level: any
#: finite wobble then looks like unbounded relative growth. Starting losses
#: below this fraction of the target power disable the guard.
DIVERGENCE_FLOOR_SCALE = 1e-12

_ALGORITHMS = ("separate", "combined")
_POLY_INITS = ("identity", "identity_exact")
_LR_SCHEDULES = ("constant", "one_cycle")
_WH_METHODS = ("auto", "time", "freq")


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for one training run.

    Parameters
    ----------
    stage_specs : sequence of (degree, order) pairs
        One pair per stage: polynomial degree and FIR order. Stage i has
        ``degree + 1`` polynomial coefficients and ``order + 1`` taps.
    algorithm : {"separate", "combined"}
        Stage-wise or joint training.
    max_iters : int
        Gradient-step budget, per stage ("separate") or total epochs
        ("combined"). 0 is allowed and yields least-squares-only stages
        with their initial polynomials.
    tol, tol_window : float, int
        Stop once the relative loss change over the last ``tol_window``
        steps drops below ``tol``.
    learning_rate, beta1, beta2, adam_eps, weight_decay : float
        AdamW settings for the polynomial updates. Weight decay touches
        only polynomial coefficients; the FIR is closed-form.
    lr_schedule : {"constant", "one_cycle"}
        "one_cycle" ramps to ``learning_rate`` over the first 30% of the
        budget and anneals to ~0, which helps squeeze out the last few
        digits on exactly-representable targets.
    ridge : float or None
        Regularization for the FIR solves; None selects the solver's
        conservative automatic value, 0.0 forces exact least squares.
    seed : int
        Seeds the polynomial-initialization jitter.
    poly_init : {"identity", "identity_exact"}
        Both start every polynomial at the identity map (coefficient 1 on
        the linear term); "identity" adds a small seeded jitter to the
        quadratic-and-up terms to break symmetry.
    cross_stage_grad : bool
        Combined mode only: when True, each polynomial's gradient also
        flows through the targets of the stages after it. Off by default;
        each stage then differentiates only its own residual term.
    wh_method : {"auto", "time", "freq"}
        Correlation estimator for the FIR solves.
    divergence_factor : float
        Abort with :class:`DivergenceError` when the loss exceeds this
        multiple of its initial value. Runs whose starting loss is already
        at rounding level relative to the target power are exempt, since
        relative growth is meaningless there.
    """

    stage_specs: tuple[tuple[int, int], ...]
    algorithm: str = "separate"
    max_iters: int = 2000
    tol: float = 1e-7
    tol_window: int = 10
    learning_rate: float = 0.02
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    weight_decay: float = 1e-4
    lr_schedule: str = "constant"
    ridge: float | None = None
    seed: int = 0
    poly_init: str = "identity"
    cross_stage_grad: bool = False
    wh_method: str = "auto"
    divergence_factor: float = 1e6

    def __post_init__(self):
        specs = []
        for i, spec in enumerate(self.stage_specs):
            try:
                degree, order = spec
            except (TypeError, ValueError):
                raise ConfigError(
                    f"stage_specs[{i}] must be a (degree, order) pair, got {spec!r}"
                ) from None
            degree, order = int(degree), int(order)
            if degree < 0 or order < 0:
                raise ConfigError(
                    f"stage_specs[{i}] must be non-negative, got ({degree}, {order})"
                )
            specs.append((degree, order))
        if not specs:
            raise ConfigError("stage_specs must name at least one stage")
        object.__setattr__(self, "stage_specs", tuple(specs))
        if self.algorithm not in _ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.max_iters < 0:
            raise ConfigError(f"max_iters must be >= 0, got {self.max_iters}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be > 0, got {self.tol}")
        if self.tol_window < 1:
            raise ConfigError(f"tol_window must be >= 1, got {self.tol_window}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        for name in ("beta1", "beta2"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ConfigError(f"{name} must be in [0, 1), got {v}")
        if self.weight_decay < 0:
            raise ConfigError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if self.lr_schedule not in _LR_SCHEDULES:
            raise ConfigError(f"unknown lr_schedule {self.lr_schedule!r}")
        if self.ridge is not None and self.ridge < 0:
            raise ConfigError(f"ridge must be >= 0, got {self.ridge}")
        if self.poly_init not in _POLY_INITS:
            raise ConfigError(f"unknown poly_init {self.poly_init!r}")
        if self.wh_method not in _WH_METHODS:
            raise ConfigError(f"unknown wh_method {self.wh_method!r}")
        if not self.divergence_factor > 1:
            raise ConfigError(
                f"divergence_factor must be > 1, got {self.divergence_factor}"
            )

    @property
    def max_order(self) -> int:
        return max(m for _, m in self.stage_specs)

    @property
    def max_degree(self) -> int:
        return max(p for p, _ in self.stage_specs)


@dataclass(frozen=True)
class TrainReport:
    """Outcome bookkeeping for one training run.

    ``stage_mse[i]`` is the training MSE of the boosted prediction after
    stage i, i.e. the mean square of stage i's final residual; it is
    non-increasing across stages. ``loss_history`` holds per-iteration MSE
    traces: one trace per stage for "separate", a single trace of the
    summed stage losses for "combined". ``iterations`` and ``converged``
    follow the same shape (per stage, or length 1).
    """

    algorithm: str
    stage_mse: tuple[float, ...]
    loss_history: tuple[tuple[float, ...], ...]
    iterations: tuple[int, ...]
    converged: tuple[bool, ...]
    wall_clock: float


def _config_snapshot(cfg: TrainConfig) -> dict:
    """JSON-ready copy of the settings, stored in the trained model."""
    doc = asdict(cfg)
    doc["stage_specs"] = [list(spec) for spec in cfg.stage_specs]
    return doc


def _fir_adjoint(taps: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Adjoint of the truncated causal convolution.

    Returns ``w`` with ``w[n] = sum_j taps[j] * g[n+j]`` (indices past the
    end contribute zero), so that ``<g, convolve(taps, v)> == <w, v>`` for
    any ``v`` of the same length.
    """
    return convolve(taps, g[::-1])[::-1]


def _power_grad(powers: np.ndarray, taps: np.ndarray, residual: np.ndarray) -> np.ndarray:
    """Gradient of ``||residual||**2`` w.r.t. polynomial coefficients.

    ``powers`` is the column matrix [x**0, x**1, ...] truncated to the
    stage's degree. The filter is a constant here.
    """
    return -2.0 * (powers.T @ _fir_adjoint(taps, residual))


def poly_loss_gradient(x, target, a, b) -> np.ndarray:
    """Gradient of the squared-residual loss w.r.t. the polynomial.

    For ``r = target - fir_convolve(b, poly_transform(x, a))`` returns
    ``d||r||^2 / da_k = -2 * <r, fir_convolve(b, x**k)>`` for each k, with
    ``b`` treated as a constant.
    """
    x = as_samples(x)
    target = as_samples(target)
    a = as_coeffs(a, "polynomial coefficient")
    b = as_coeffs(b, "FIR tap")
    if len(x) != len(target):
        raise DataError(
            f"input and target lengths differ: {len(x)} vs {len(target)}"
        )
    r = target - convolve(b, poly_transform(x, a))
    powers = np.vander(x, len(a), increasing=True)
    return _power_grad(powers, b, r)


def _init_polys(cfg: TrainConfig) -> list[np.ndarray]:
    """Identity-map starting polynomials, optionally jittered.

    A degree-0 stage cannot represent the identity; it starts at the
    constant 1 so its filter still sees a nonzero input.
    """
    rng = np.random.default_rng(cfg.seed)
    polys = []
    for degree, _ in cfg.stage_specs:
        a = np.zeros(degree + 1)
        a[min(degree, 1)] = 1.0
        if cfg.poly_init == "identity" and degree >= 2:
            a[2:] += rng.uniform(-INIT_JITTER, INIT_JITTER, degree - 1)
        polys.append(a)
    return polys


def _validate_signals(x, target, cfg: TrainConfig) -> tuple[np.ndarray, np.ndarray]:
    x = as_samples(x)
    target = as_samples(target)
    if len(x) != len(target):
        raise DataError(
            f"input and target lengths differ: {len(x)} vs {len(target)}"
        )
    if len(x) <= cfg.max_order:
        raise DataError(
            f"need more samples than the longest filter: {len(x)} samples "
            f"for order {cfg.max_order}"
        )
    return x, target


def _powers(x: np.ndarray, max_degree: int) -> np.ndarray:
    return np.vander(x, max_degree + 1, increasing=True)


def _learning_rate(cfg: TrainConfig, step: int) -> float:
    if cfg.lr_schedule == "one_cycle":
        return one_cycle_lr(step, cfg.max_iters, cfg.learning_rate)
    return cfg.learning_rate


def _check_convergence(history: list[float], cfg: TrainConfig) -> bool:
    if len(history) <= cfg.tol_window:
        return False
    prev = history[-1 - cfg.tol_window]
    scale = max(prev, np.finfo(np.float64).tiny)
    return abs(history[-1] - prev) <= cfg.tol * scale


def _check_divergence(
    loss: float, initial: float, floor: float, cfg: TrainConfig
) -> None:
    if initial <= floor:
        return
    if not loss <= cfg.divergence_factor * initial:
        raise DivergenceError(
            f"loss grew from {initial:.6g} to {loss:.6g}, beyond "
            f"{cfg.divergence_factor:g}x the starting value; try a lower "
            f"learning_rate"
        )


def _wh_taps(z: np.ndarray, target: np.ndarray, order: int, cfg: TrainConfig) -> np.ndarray:
    prob = WienerHopfProblem(x=z, target=target, order=order, ridge=cfg.ridge)
    return solve(prob, method=cfg.wh_method)


def _fit_stage(
    x: np.ndarray,
    powers: np.ndarray,
    target: np.ndarray,
    degree: int,
    order: int,
    a0: np.ndarray,
    cfg: TrainConfig,
):
    """Alternate least-squares filter solves with polynomial gradient steps."""
    n = len(x)
    cols = powers[:, : degree + 1]
    a = a0.copy()
    state = AdamState.zeros(len(a))

    def evaluate(a):
        z = poly_transform(x, a)
        b = _wh_taps(z, target, order, cfg)
        r = target - convolve(b, z)
        return b, r, float(r @ r) / n

    b, r, loss = evaluate(a)
    history = [loss]
    initial = loss
    floor = DIVERGENCE_FLOOR_SCALE * float(target @ target) / n
    converged = False
    steps = 0
    for it in range(cfg.max_iters):
        grad = _power_grad(cols, b, r)
        a, state = adam_step(
            a,
            grad,
            state,
            lr=_learning_rate(cfg, it),
            beta1=cfg.beta1,
            beta2=cfg.beta2,
            eps=cfg.adam_eps,
            weight_decay=cfg.weight_decay,
        )
        try:
            b, r, loss = evaluate(a)
        except NumericOverflowError as exc:
            raise DivergenceError(
                f"stage overflowed after {it + 1} gradient steps; try a "
                f"lower learning_rate ({exc})"
            ) from exc
        history.append(loss)
        steps = it + 1
        _check_divergence(loss, initial, floor, cfg)
        if _check_convergence(history, cfg):
            converged = True
            break
    return a, b, r, history, steps, converged


def train_separate(x, target, cfg: TrainConfig) -> tuple[GbfModel, TrainReport]:
    """Stage-wise boosted training.

    Each stage is trained to convergence against the running residual,
    then frozen; the residual becomes the next stage's target.

    Raises
    ------
    DivergenceError
        If a stage's loss exceeds ``divergence_factor`` times its starting
        value or overflows.
    SingularSystemError
        If a filter solve fails with ``ridge=0``.
    """
    t0 = time.perf_counter()
    x, target = _validate_signals(x, target, cfg)
    powers = _powers(x, cfg.max_degree)
    inits = _init_polys(cfg)

    stages = []
    stage_mse = []
    histories = []
    iterations = []
    converged = []
    running = target
    for (degree, order), a0 in zip(cfg.stage_specs, inits):
        a, b, r, history, steps, conv = _fit_stage(
            x, powers, running, degree, order, a0, cfg
        )
        stages.append(HammersteinStage(poly=a, fir=b))
        stage_mse.append(history[-1])
        histories.append(tuple(history))
        iterations.append(steps)
        converged.append(conv)
        running = r

    model = GbfModel(
        stages=tuple(stages),
        stage_mse=tuple(stage_mse),
        train_config=_config_snapshot(cfg),
    )
    report = TrainReport(
        algorithm="separate",
        stage_mse=tuple(stage_mse),
        loss_history=tuple(histories),
        iterations=tuple(iterations),
        converged=tuple(converged),
        wall_clock=time.perf_counter() - t0,
    )
    return model, report


def train_combined(x, target, cfg: TrainConfig) -> tuple[GbfModel, TrainReport]:
    """Joint boosted training.

    Every epoch refits all filters along the cascade, then takes one
    gradient step on all polynomials against the sum of the per-stage
    squared residuals. By default each polynomial differentiates only its
    own stage's term; ``cross_stage_grad=True`` adds the flow through the
    later stages' targets.

    Raises the same errors as :func:`train_separate`.
    """
    t0 = time.perf_counter()
    x, target = _validate_signals(x, target, cfg)
    n = len(x)
    powers = _powers(x, cfg.max_degree)
    polys = _init_polys(cfg)
    states = [AdamState.zeros(len(a)) for a in polys]

    def cascade(polys):
        taps = []
        residuals = []
        running = target
        for (degree, order), a in zip(cfg.stage_specs, polys):
            z = poly_transform(x, a)
            b = _wh_taps(z, running, order, cfg)
            r = running - convolve(b, z)
            taps.append(b)
            residuals.append(r)
            running = r
        return taps, residuals

    def total_loss(residuals):
        return sum(float(r @ r) for r in residuals) / n

    taps, residuals = cascade(polys)
    loss = total_loss(residuals)
    history = [loss]
    initial = loss
    floor = DIVERGENCE_FLOOR_SCALE * float(target @ target) / n
    converged = False
    steps = 0
    for epoch in range(cfg.max_iters):
        if cfg.cross_stage_grad:
            # The residuals telescope, so the gradient through later
            # targets replaces r_i by the suffix sum of residuals.
            suffix = np.zeros(n)
            effective = [None] * len(residuals)
            for i in range(len(residuals) - 1, -1, -1):
                suffix = suffix + residuals[i]
                effective[i] = suffix
        else:
            effective = residuals
        lr = _learning_rate(cfg, epoch)
        for i, (degree, _) in enumerate(cfg.stage_specs):
            grad = _power_grad(powers[:, : degree + 1], taps[i], effective[i])
            polys[i], states[i] = adam_step(
                polys[i],
                grad,
                states[i],
                lr=lr,
                beta1=cfg.beta1,
                beta2=cfg.beta2,
                eps=cfg.adam_eps,
                weight_decay=cfg.weight_decay,
            )
        try:
            taps, residuals = cascade(polys)
        except NumericOverflowError as exc:
            raise DivergenceError(
                f"cascade overflowed after {epoch + 1} epochs; try a lower "
                f"learning_rate ({exc})"
            ) from exc
        loss = total_loss(residuals)
        history.append(loss)
        steps = epoch + 1
        _check_divergence(loss, initial, floor, cfg)
        if _check_convergence(history, cfg):
            converged = True
            break

    stages = tuple(
        HammersteinStage(poly=a, fir=b) for a, b in zip(polys, taps)
    )
    stage_mse = tuple(float(r @ r) / n for r in residuals)
    model = GbfModel(
        stages=stages, stage_mse=stage_mse, train_config=_config_snapshot(cfg)
    )
    report = TrainReport(
        algorithm="combined",
        stage_mse=stage_mse,
        loss_history=(tuple(history),),
        iterations=(steps,),
        converged=(converged,),
        wall_clock=time.perf_counter() - t0,
    )
    return model, report


def train(x, target, cfg: TrainConfig) -> tuple[GbfModel, TrainReport]:
    """Dispatch on ``cfg.algorithm``."""
    if cfg.algorithm == "combined":
        return train_combined(x, target, cfg)
    return train_separate(x, target, cfg)
