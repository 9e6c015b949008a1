"""Model containers and serialization.

A boosted filter model is an ordered list of Hammerstein stages. Each
stage applies a static polynomial to the input signal and filters the
result with a causal FIR filter; the model output is the sum of the stage
outputs. Stages are fit to successive residuals during training, so stage
order matters for interpretation but the forward pass is a plain sum.

Models serialize to a versioned JSON document. Floats round-trip exactly
(shortest repr), and a saved file never embeds timestamps or environment
details, so retraining under a fixed seed reproduces the file byte for
byte.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, ModelFormatError
from .signals import as_coeffs, as_samples, convolve, poly_transform

__all__ = [
    "HammersteinStage",
    "GbfModel",
    "stage_forward",
    "model_forward",
    "save_model",
    "load_model",
]

FORMAT_VERSION = 1


@dataclass(frozen=True)
class HammersteinStage:
    """One polynomial-then-FIR stage.

    ``poly[k]`` multiplies ``x**k``; ``fir[j]`` multiplies ``z[n-j]`` where
    ``z`` is the polynomial output. Degree and order are implied by the
    coefficient lengths.
    """

    poly: np.ndarray
    fir: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "poly", as_coeffs(self.poly, "polynomial coefficient"))
        object.__setattr__(self, "fir", as_coeffs(self.fir, "FIR tap"))

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    @property
    def order(self) -> int:
        return len(self.fir) - 1


@dataclass(frozen=True)
class GbfModel:
    """An ordered cascade of Hammerstein stages.

    ``stage_mse`` optionally records the training-set mean squared error of
    the boosted prediction after each stage was added, and ``train_config``
    a plain-dict snapshot of the settings that produced the model. Both are
    diagnostic metadata and do not affect the forward pass.
    """

    stages: tuple[HammersteinStage, ...]
    stage_mse: tuple[float, ...] | None = field(default=None)
    train_config: dict | None = field(default=None)

    def __post_init__(self):
        stages = tuple(self.stages)
        if not stages:
            raise DataError("a model needs at least one stage")
        for i, stage in enumerate(stages):
            if not isinstance(stage, HammersteinStage):
                raise DataError(f"stages[{i}] is not a HammersteinStage")
        object.__setattr__(self, "stages", stages)
        if self.stage_mse is not None:
            mse = tuple(float(v) for v in self.stage_mse)
            if len(mse) != len(stages):
                raise DataError(
                    f"stage_mse has {len(mse)} entries for {len(stages)} stages"
                )
            if any(not math.isfinite(v) or v < 0 for v in mse):
                raise DataError("stage_mse entries must be finite and >= 0")
            object.__setattr__(self, "stage_mse", mse)
        if self.train_config is not None and not isinstance(self.train_config, dict):
            raise DataError("train_config must be a plain dict")

    def __len__(self) -> int:
        return len(self.stages)


def stage_forward(stage: HammersteinStage, x) -> np.ndarray:
    """Output of a single stage for input ``x``."""
    x = as_samples(x)
    return convolve(stage.fir, poly_transform(x, stage.poly))


def model_forward(model: GbfModel, x) -> np.ndarray:
    """Boosted prediction: the sum of all stage outputs."""
    x = as_samples(x)
    total = np.zeros_like(x)
    for stage in model.stages:
        total += stage_forward(stage, x)
    return total


# -- serialization ----------------------------------------------------------


def _float_list(values: np.ndarray) -> list[float]:
    return [float(v) for v in values]


def model_to_dict(model: GbfModel) -> dict:
    doc = {
        "format": "gbfilt-model",
        "version": FORMAT_VERSION,
        "stages": [
            {
                "degree": s.degree,
                "order": s.order,
                "poly": _float_list(s.poly),
                "fir": _float_list(s.fir),
            }
            for s in model.stages
        ],
    }
    if model.stage_mse is not None:
        doc["stage_mse"] = list(model.stage_mse)
    if model.train_config is not None:
        doc["train_config"] = model.train_config
    return doc


def save_model(model: GbfModel, path) -> None:
    """Write a model to ``path`` as JSON.

    Training-set MSE metadata, when present, must be non-increasing across
    stages (each boosting stage fits the previous residual and can always
    fall back to a zero filter); violations indicate a corrupted model and
    are rejected rather than written.

    The write is atomic: the document goes to a temporary file in the same
    directory which then replaces ``path``.
    """
    if model.stage_mse is not None:
        mse = model.stage_mse
        for i in range(1, len(mse)):
            # Tiny slack for accumulated rounding in the recorded values.
            if mse[i] > mse[i - 1] + 1e-12 * max(1.0, mse[i - 1]):
                raise DataError(
                    f"stage_mse must be non-increasing: stage {i} has "
                    f"{mse[i]!r} after {mse[i - 1]!r}"
                )
    text = json.dumps(model_to_dict(model), indent=2)
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gbfilt-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise ModelFormatError(f"missing required field {key!r}", path)
    return doc[key]


def _int_field(doc: dict, key: str, parent: str) -> int:
    value = _require(doc, key, f"{parent}.{key}")
    if isinstance(value, bool) or not isinstance(value, int):
        raise ModelFormatError(
            f"expected an integer, got {value!r}", f"{parent}.{key}"
        )
    return value


def _coeff_array(values, path: str) -> np.ndarray:
    if not isinstance(values, list) or not values:
        raise ModelFormatError("expected a non-empty list of numbers", path)
    out = np.empty(len(values), dtype=np.float64)
    for i, v in enumerate(values):
        # bool is an int subclass; reject it explicitly.
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ModelFormatError("expected a number", f"{path}[{i}]")
        if not math.isfinite(v):
            raise ModelFormatError(f"non-finite value {v!r}", f"{path}[{i}]")
        out[i] = v
    return out


def model_from_dict(doc) -> GbfModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    fmt = _require(doc, "format", "format")
    if fmt != "gbfilt-model":
        raise ModelFormatError(f"unrecognized format {fmt!r}", "format")
    version = _require(doc, "version", "version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported version {version!r}; this build reads version "
            f"{FORMAT_VERSION}",
            "version",
        )
    stages_doc = _require(doc, "stages", "stages")
    if not isinstance(stages_doc, list) or not stages_doc:
        raise ModelFormatError("expected a non-empty list of stages", "stages")
    stages = []
    for i, stage_doc in enumerate(stages_doc):
        spath = f"stages[{i}]"
        if not isinstance(stage_doc, dict):
            raise ModelFormatError("expected a stage object", spath)
        poly = _coeff_array(_require(stage_doc, "poly", f"{spath}.poly"), f"{spath}.poly")
        fir = _coeff_array(_require(stage_doc, "fir", f"{spath}.fir"), f"{spath}.fir")
        degree = _int_field(stage_doc, "degree", spath)
        order = _int_field(stage_doc, "order", spath)
        if degree != len(poly) - 1:
            raise ModelFormatError(
                f"declared degree {degree} but {len(poly)} polynomial "
                f"coefficients",
                f"{spath}.degree",
            )
        if order != len(fir) - 1:
            raise ModelFormatError(
                f"declared order {order} but {len(fir)} filter taps",
                f"{spath}.order",
            )
        stages.append(HammersteinStage(poly=poly, fir=fir))
    stage_mse = None
    if "stage_mse" in doc:
        raw = doc["stage_mse"]
        if not isinstance(raw, list):
            raise ModelFormatError("expected a list of numbers", "stage_mse")
        mse = []
        for i, v in enumerate(raw):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ModelFormatError("expected a number", f"stage_mse[{i}]")
            if not math.isfinite(v) or v < 0:
                raise ModelFormatError(
                    f"expected a finite value >= 0, got {v!r}", f"stage_mse[{i}]"
                )
            mse.append(float(v))
        if len(mse) != len(stages):
            raise ModelFormatError(
                f"{len(mse)} entries for {len(stages)} stages", "stage_mse"
            )
        stage_mse = tuple(mse)
    train_config = None
    if "train_config" in doc:
        train_config = doc["train_config"]
        if not isinstance(train_config, dict):
            raise ModelFormatError("expected an object", "train_config")
    try:
        return GbfModel(
            stages=tuple(stages), stage_mse=stage_mse, train_config=train_config
        )
    except DataError as exc:
        raise ModelFormatError(str(exc)) from exc


def load_model(path) -> GbfModel:
    """Read a model written by :func:`save_model`.

    Raises
    ------
    ModelFormatError
        If the file is not valid JSON or violates the model schema. The
        error's ``path`` attribute names the offending field, e.g.
        ``"stages[1].poly[2]"``.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not valid JSON: {exc}") from exc
    return model_from_dict(doc)
