import json

import numpy as np
import pytest

from gbfilt.errors import DataError, ModelFormatError
from gbfilt.model import (
    GbfModel,
    HammersteinStage,
    load_model,
    model_forward,
    save_model,
    stage_forward,
)


def naive_stage(b, a, x):
    """Literal double sum over taps and powers, zero pre-history."""
    n = len(x)
    y = np.zeros(n)
    for i in range(n):
        for j in range(len(b)):
            if j > i:
                continue
            for k in range(len(a)):
                y[i] += b[j] * a[k] * x[i - j] ** k
    return y


def test_stage_identity():
    stage = HammersteinStage(poly=[0.0, 1.0], fir=[1.0])
    x = np.array([1.0, -2.0, 0.5])
    assert np.array_equal(stage_forward(stage, x), x)


def test_stage_kronecker_delta_static_nonlinearity():
    stage = HammersteinStage(poly=[0.0, 0.0, 1.0], fir=[1.0])
    out = stage_forward(stage, [1.0, 2.0, 3.0])
    assert np.array_equal(out, [1.0, 4.0, 9.0])


def test_stage_matches_naive_double_sum():
    rng = np.random.default_rng(0)
    a = rng.normal(size=3)
    b = rng.normal(size=4)
    x = rng.uniform(-1, 1, 16)
    stage = HammersteinStage(poly=a, fir=b)
    np.testing.assert_allclose(
        stage_forward(stage, x), naive_stage(b, a, x), rtol=0, atol=1e-10
    )


def test_stage_matches_naive_randomized():
    rng = np.random.default_rng(1)
    for _ in range(20):
        p = int(rng.integers(0, 6))
        m = int(rng.integers(0, 17))
        a = rng.normal(size=p + 1)
        b = rng.normal(size=m + 1)
        x = rng.uniform(-1.5, 1.5, int(rng.integers(m + 1, 64)))
        stage = HammersteinStage(poly=a, fir=b)
        np.testing.assert_allclose(
            stage_forward(stage, x), naive_stage(b, a, x), rtol=0, atol=1e-10
        )


def test_stage_scale_degeneracy():
    rng = np.random.default_rng(2)
    a = rng.normal(size=4)
    b = rng.normal(size=5)
    x = rng.uniform(-1, 1, 128)
    base = stage_forward(HammersteinStage(poly=a, fir=b), x)
    for c in (2.0, -3.0, 0.125):
        other = stage_forward(HammersteinStage(poly=c * a, fir=b / c), x)
        np.testing.assert_allclose(other, base, rtol=1e-12, atol=1e-14)


def test_model_forward_single_stage():
    stage = HammersteinStage(poly=[0.0, 1.0, 0.5], fir=[1.0, -0.5])
    model = GbfModel(stages=(stage,))
    x = np.linspace(-1, 1, 32)
    assert np.array_equal(model_forward(model, x), stage_forward(stage, x))


def test_model_forward_additivity():
    stage = HammersteinStage(poly=[0.0, 1.0, 0.5], fir=[1.0, -0.5])
    model = GbfModel(stages=(stage, stage))
    x = np.linspace(-1, 1, 32)
    np.testing.assert_allclose(
        model_forward(model, x), 2 * stage_forward(stage, x), rtol=1e-15
    )


def test_model_forward_is_stage_sum():
    rng = np.random.default_rng(3)
    stages = tuple(
        HammersteinStage(poly=rng.normal(size=3), fir=rng.normal(size=4))
        for _ in range(3)
    )
    model = GbfModel(stages=stages)
    x = rng.uniform(-1, 1, 32)
    expect = sum(stage_forward(s, x) for s in stages)
    np.testing.assert_allclose(model_forward(model, x), expect, rtol=0, atol=1e-12)


def test_model_forward_permutation_invariant():
    rng = np.random.default_rng(4)
    stages = [
        HammersteinStage(poly=rng.normal(size=3), fir=rng.normal(size=2))
        for _ in range(4)
    ]
    x = rng.uniform(-1, 1, 40)
    a = model_forward(GbfModel(stages=tuple(stages)), x)
    b = model_forward(GbfModel(stages=tuple(reversed(stages))), x)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)


def test_model_validation():
    with pytest.raises(DataError):
        GbfModel(stages=())
    stage = HammersteinStage(poly=[0.0, 1.0], fir=[1.0])
    with pytest.raises(DataError):
        GbfModel(stages=(stage,), stage_mse=(1.0, 0.5))
    with pytest.raises(DataError):
        GbfModel(stages=(stage,), stage_mse=(-1.0,))


def test_round_trip_exact(tmp_path):
    rng = np.random.default_rng(5)
    stages = tuple(
        HammersteinStage(poly=rng.normal(size=4), fir=rng.normal(size=6))
        for _ in range(3)
    )
    model = GbfModel(stages=stages, stage_mse=(0.5, 0.25, 0.25))
    path = tmp_path / "model.json"
    save_model(model, path)
    back = load_model(path)
    assert len(back) == 3
    for s1, s2 in zip(model.stages, back.stages):
        assert np.array_equal(s1.poly, s2.poly)
        assert np.array_equal(s1.fir, s2.fir)
    assert back.stage_mse == model.stage_mse


def test_save_is_deterministic(tmp_path):
    stage = HammersteinStage(poly=[0.1, 1.0 / 3.0], fir=[1.0, -0.25])
    model = GbfModel(stages=(stage,))
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_model(model, p1)
    save_model(model, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_unknown_version_rejected(tmp_path):
    stage = HammersteinStage(poly=[0.0, 1.0], fir=[1.0])
    path = tmp_path / "model.json"
    save_model(GbfModel(stages=(stage,)), path)
    doc = json.loads(path.read_text())
    doc["version"] = 99
    path.write_text(json.dumps(doc))
    with pytest.raises(ModelFormatError, match="version"):
        load_model(path)


def test_nan_coefficient_names_field(tmp_path):
    path = tmp_path / "model.json"
    doc = {
        "format": "gbfilt-model",
        "version": 1,
        "stages": [
            {"degree": 1, "order": 0, "poly": [0.0, 1.0], "fir": [1.0]},
            {"degree": 2, "order": 0,
             "poly": [0.0, 1.0, float("nan")], "fir": [1.0]},
        ],
    }
    # json.dumps happily emits a NaN token; the loader must reject it
    path.write_text(json.dumps(doc))
    with pytest.raises(ModelFormatError) as err:
        load_model(path)
    assert err.value.path == "stages[1].poly[2]"


def test_malformed_documents(tmp_path):
    path = tmp_path / "model.json"
    cases = [
        "not json at all",
        json.dumps([1, 2, 3]),
        json.dumps({"format": "gbfilt-model", "version": 1}),
        json.dumps({"format": "other", "version": 1, "stages": []}),
        json.dumps({"format": "gbfilt-model", "version": 1, "stages": []}),
        json.dumps(
            {"format": "gbfilt-model", "version": 1, "stages": [{"poly": [1.0]}]}
        ),
        json.dumps(
            {
                "format": "gbfilt-model",
                "version": 1,
                "stages": [{"poly": [1.0, "x"], "fir": [1.0]}],
            }
        ),
        json.dumps(
            {
                "format": "gbfilt-model",
                "version": 1,
                "stages": [
                    {"degree": 0, "order": 0, "poly": [1.0], "fir": [1.0]}
                ],
                "stage_mse": [1.0, 2.0],
            }
        ),
        json.dumps(
            {
                "format": "gbfilt-model",
                "version": 1,
                "stages": [
                    {"degree": 2, "order": 0, "poly": [0.0, 1.0], "fir": [1.0]}
                ],
            }
        ),
        json.dumps(
            {
                "format": "gbfilt-model",
                "version": 1,
                "stages": [
                    {"degree": 1, "order": 3, "poly": [0.0, 1.0], "fir": [1.0]}
                ],
            }
        ),
        json.dumps(
            {
                "format": "gbfilt-model",
                "version": 1,
                "stages": [
                    {"degree": "1", "order": 0, "poly": [0.0, 1.0], "fir": [1.0]}
                ],
            }
        ),
        json.dumps(
            {
                "format": "gbfilt-model",
                "version": 1,
                "stages": [
                    {"degree": 0, "order": 0, "poly": [1.0], "fir": [1.0]}
                ],
                "train_config": "separate",
            }
        ),
    ]
    for text in cases:
        path.write_text(text)
        with pytest.raises(ModelFormatError):
            load_model(path)


def test_declared_shape_mismatch_names_field(tmp_path):
    path = tmp_path / "model.json"
    path.write_text(json.dumps({
        "format": "gbfilt-model",
        "version": 1,
        "stages": [
            {"degree": 2, "order": 0, "poly": [0.0, 1.0], "fir": [1.0]}
        ],
    }))
    with pytest.raises(ModelFormatError, match="declared degree") as err:
        load_model(path)
    assert err.value.path == "stages[0].degree"


def test_round_trip_with_metadata(tmp_path):
    stage = HammersteinStage(poly=[0.0, 1.0], fir=[1.0, -0.5])
    snapshot = {"algorithm": "separate", "seed": 3, "stage_specs": [[1, 1]]}
    model = GbfModel(stages=(stage,), stage_mse=(0.25,), train_config=snapshot)
    path = tmp_path / "model.json"
    save_model(model, path)
    back = load_model(path)
    assert back.train_config == snapshot
    doc = json.loads(path.read_text())
    assert doc["stages"][0]["degree"] == 1
    assert doc["stages"][0]["order"] == 1


def test_save_rejects_increasing_mse(tmp_path):
    stage = HammersteinStage(poly=[0.0, 1.0], fir=[1.0])
    model = GbfModel(stages=(stage, stage), stage_mse=(1.0, 2.0))
    with pytest.raises(DataError, match="non-increasing"):
        save_model(model, tmp_path / "model.json")
    assert not (tmp_path / "model.json").exists()


def test_missing_file_is_format_error(tmp_path):
    with pytest.raises((ModelFormatError, OSError)):
        load_model(tmp_path / "nope.json")
