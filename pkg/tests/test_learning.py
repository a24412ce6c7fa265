import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exposcan.errors import ClassTooSmall, InputTooSmall, LengthMismatch
from exposcan.learning import (
    ClassifierModel,
    LabeledExample,
    SearchSpace,
    TaskKind,
    build_classifier,
    evaluate,
    from_counts,
    layer_widths,
    train,
)

SMALL_SPACE = SearchSpace(trials=3, folds=2)


def test_layer_widths_768():
    assert layer_widths(768) == [256, 128, 64, 32]


def test_layer_widths_384():
    assert layer_widths(384) == [128, 64, 32, 16]


def test_sink8_head_has_eight_outputs():
    model = build_classifier(768, TaskKind.SINK8)
    assert model.head_w.shape == (32, 8)
    binary = build_classifier(768, TaskKind.BINARY)
    assert binary.head_w.shape == (32, 1)


def test_input_too_small():
    with pytest.raises(InputTooSmall):
        layer_widths(23)


@given(st.integers(min_value=24, max_value=4096))
@settings(max_examples=60, deadline=None)
def test_width_rule_property(input_dim):
    widths = layer_widths(input_dim)
    assert len(widths) == 4
    assert widths[0] == input_dim // 3
    for prev, nxt in zip(widths, widths[1:]):
        assert nxt == prev // 2
    assert all(w >= 1 for w in widths)


def test_predict_softmax_sums_to_one():
    model = build_classifier(24, TaskKind.SINK8, seed=5)
    rng = np.random.default_rng(0)
    probs = model.predict(rng.normal(size=24))
    assert probs.shape == (8,)
    assert abs(probs.sum() - 1.0) <= 1e-6


def test_predict_deterministic():
    model = build_classifier(24, TaskKind.BINARY, seed=5)
    x = np.random.default_rng(1).normal(size=24)
    assert model.predict(x) == model.predict(x)


def test_zero_weight_model_predicts_half():
    model = build_classifier(24, TaskKind.BINARY, seed=5)
    for param in model.parameters():
        param[...] = 0.0
    assert model.predict(np.ones(24)) == pytest.approx(0.5)


def gradient_check(model, x, y, l2=1e-4, eps=1e-6):
    _, grads = model.loss_and_grads(x, y, l2=l2)
    analytic = np.concatenate([g.reshape(-1) for g in model.gradient_list(grads)])
    numeric = np.empty_like(analytic)
    offset = 0
    for param in model.parameters():
        flat = param.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            up = model.loss(x, y, l2=l2)
            flat[i] = original - eps
            down = model.loss(x, y, l2=l2)
            flat[i] = original
            numeric[offset + i] = (up - down) / (2 * eps)
        offset += flat.size
    denom = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-12)
    return np.linalg.norm(analytic - numeric) / denom


def test_gradient_check_32_probes():
    rng = np.random.default_rng(7)
    worst = 0.0
    for probe in range(32):
        input_dim = int(rng.integers(24, 40))
        task = TaskKind.BINARY if probe % 2 == 0 else TaskKind.SINK8
        activation = ("relu", "elu", "sigmoid")[probe % 3]
        model = build_classifier(input_dim, task, activation, seed=probe)
        x = rng.normal(size=(2, input_dim))
        y = (rng.integers(0, 2 if task is TaskKind.BINARY else 8, size=2))
        worst = max(worst, gradient_check(model, x, y))
    assert worst <= 1e-4, f"worst relative error {worst}"


def _clusters(n_per_class=200, dim=24, seed=0, gap=4.0):
    rng = np.random.default_rng(seed)
    data = []
    for label, center in ((0, -gap / 2), (1, gap / 2)):
        points = rng.normal(loc=center, scale=1.0, size=(n_per_class, dim))
        data.extend(LabeledExample(p, label, f"c{label}") for p in points)
    return data


def test_separable_clusters_reach_high_f1():
    result = train(24, TaskKind.BINARY, _clusters(seed=3), space=SMALL_SPACE, seed=3)
    assert result.metrics.f1 >= 0.95


def test_single_class_raises():
    data = [LabeledExample(np.zeros(24), 1, "x") for _ in range(40)]
    with pytest.raises(ClassTooSmall):
        train(24, TaskKind.BINARY, data, space=SMALL_SPACE, seed=0)


def test_training_determinism():
    data = _clusters(n_per_class=40, seed=9)
    first = train(24, TaskKind.BINARY, data, space=SMALL_SPACE, seed=21)
    second = train(24, TaskKind.BINARY, data, space=SMALL_SPACE, seed=21)
    assert first.config == second.config
    assert first.metrics == second.metrics
    for a, b in zip(first.model.parameters(), second.model.parameters()):
        assert np.array_equal(a, b)


def test_trial_rows_record_the_search():
    data = _clusters(n_per_class=40, seed=2)
    result = train(24, TaskKind.BINARY, data, space=SMALL_SPACE, seed=4)
    assert len(result.trials) == 3
    assert all("config" in row and "cvF1" in row for row in result.trials)


def test_diverged_trial_is_recorded_and_search_continues(monkeypatch):
    from exposcan.errors import NonFiniteLoss
    from exposcan.learning import training as training_module

    real_fit = training_module._adam_fit

    def flaky_fit(model, x, y, x_val, y_val, cfg, rng):
        if cfg.activation == "sigmoid":
            raise NonFiniteLoss("loss became nan")
        return real_fit(model, x, y, x_val, y_val, cfg, rng)

    monkeypatch.setattr(training_module, "_adam_fit", flaky_fit)
    data = _clusters(n_per_class=40, seed=1)
    result = train(24, TaskKind.BINARY, data,
                   space=SearchSpace(trials=12, folds=2), seed=1)
    failed = [row for row in result.trials if row.get("error")]
    succeeded = [row for row in result.trials if row.get("cvF1") is not None]
    assert failed and succeeded
    assert all(row["cvF1"] is None for row in failed)
    assert result.config.activation != "sigmoid"


def test_non_finite_everywhere_raises():
    from exposcan.errors import NonFiniteLoss

    rng = np.random.default_rng(0)
    data = [LabeledExample(np.full(24, np.nan), int(l), "x")
            for l in rng.integers(0, 2, size=60)]
    with pytest.raises(NonFiniteLoss):
        train(24, TaskKind.BINARY, data, space=SMALL_SPACE, seed=2)


def test_model_json_round_trip(tmp_path):
    model = build_classifier(30, TaskKind.SINK8, "elu", seed=8)
    model.provider_id = "hash-384"
    model.metrics = {"f1": 0.5}
    path = tmp_path / "m.json"
    model.save(path)
    loaded = ClassifierModel.load(path)
    x = np.random.default_rng(3).normal(size=30)
    assert np.allclose(model.predict(x), loaded.predict(x))
    data = json.loads(path.read_text())
    assert data["formatVersion"] == 1
    assert data["layerWidths"] == [10, 5, 2, 1]


def test_evaluate_zero_denominator_convention():
    metrics = evaluate([0, 0], [0, 0])
    assert metrics.precision == 0.0
    assert metrics.recall == 0.0
    assert metrics.f1 == 0.0
    assert metrics.accuracy == 1.0


def test_evaluate_published_f1_from_rates():
    # precision 22.6%, recall 100%: 113 hits over 500 flagged, nothing missed
    metrics = from_counts(tp=113, fp=387, fn=0, tn=0)
    assert metrics.precision == pytest.approx(0.226)
    assert metrics.recall == 1.0
    assert metrics.f1 == pytest.approx(0.369, abs=1e-3)


def test_evaluate_perfect():
    metrics = evaluate([0, 1, 1], [0, 1, 1])
    assert (metrics.precision, metrics.recall, metrics.f1, metrics.accuracy) == (
        1.0, 1.0, 1.0, 1.0)


def test_evaluate_multiclass_micro():
    metrics = evaluate([0, 1, 2, 2], [0, 1, 1, 2])
    assert metrics.tp == 3
    assert metrics.fp == 1
    assert metrics.fn == 1


def test_evaluate_length_mismatch():
    with pytest.raises(LengthMismatch):
        evaluate([1], [1, 0])
