import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import best_halfplane_accuracy, dual_active_set, dual_projected_gradient, dual_value

from ovoscope.errors import TrainingDataError
from ovoscope.svm import (
    FERTILE,
    INFERTILE,
    LabeledSample,
    SvmModel,
    TrainConfig,
    decision_value,
    decision_value_sv,
    dual_objective,
    kkt_violation,
    load_model,
    model_from_dict,
    model_to_dict,
    predict,
    predict_label,
    primal_objective,
    save_model,
    train_smo,
)

E1 = (1.0, 0.0, 0.0, 0.0, 0.0)
TWO_POINT = [LabeledSample(E1, +1), LabeledSample((-1.0, 0, 0, 0, 0), -1)]


def random_problem(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 7))
    d = int(rng.integers(2, 6))
    X = rng.normal(size=(n, d))
    y = np.where(rng.random(n) < 0.5, 1, -1)
    y[0], y[1] = 1, -1
    c = [0.1, 1.0, 10.0][seed % 3]
    return [LabeledSample(tuple(x), int(t)) for x, t in zip(X, y)], X, y, c


@pytest.fixture(scope="module")
def analytic():
    return train_smo(TWO_POINT, TrainConfig(c=10))


# --- dual objective ---------------------------------------------------------

def test_dual_objective_examples():
    assert dual_objective(TWO_POINT, [0, 0]) == 0
    assert dual_objective([LabeledSample(E1, 1)], [1.0]) == 0.5
    assert dual_objective(TWO_POINT, [0.5, 0.5]) == 0.5


def test_dual_objective_length_mismatch():
    with pytest.raises(ValueError):
        dual_objective(TWO_POINT, [1.0])


# --- training ---------------------------------------------------------------

def test_analytic_two_point(analytic):
    assert np.allclose(analytic.weights, E1, atol=1e-6)
    assert abs(analytic.bias) <= 1e-6
    assert np.allclose(analytic.alphas, [0.5, 0.5], atol=1e-6)
    assert analytic.converged


def test_analytic_decision_values(analytic):
    assert decision_value(analytic, (0, 0, 0, 0, 0)) == pytest.approx(0, abs=1e-9)
    assert decision_value(analytic, (2, 0, 0, 0, 0)) == pytest.approx(2, abs=1e-9)
    assert decision_value(analytic, (-2, 0, 0, 0, 0)) == pytest.approx(-2, abs=1e-9)
    assert decision_value_sv(analytic, (2, 0, 0, 0, 0)) == pytest.approx(2, abs=1e-9)


def test_analytic_kkt(analytic):
    assert kkt_violation(analytic, TWO_POINT) <= 1e-9


def _fixed(weights, bias):
    w = np.asarray(weights, float)
    return SvmModel(weights=w, bias=bias, c=1.0, support_x=np.zeros((0, len(w))),
                    support_y=np.zeros(0, int), support_alpha=np.zeros(0))


@pytest.mark.parametrize("bias, label", [(2.0, "fertile"), (-2.0, "infertile"), (0.0, "infertile")])
def test_prediction_sign_and_tie(bias, label):
    model = _fixed(np.zeros(5), bias)
    assert predict_label(model, np.zeros(5)) == label


def test_untrained_state_violates_kkt():
    samples = [LabeledSample((0.2, 0), 1), LabeledSample((-0.2, 0), -1)]
    zero = SvmModel(weights=np.zeros(2), bias=0.0, c=1.0, support_x=np.zeros((0, 2)),
                    support_y=np.zeros(0, int), support_alpha=np.zeros(0), alphas=np.zeros(2))
    assert kkt_violation(zero, samples) > 0


def test_kkt_violation_needs_coefficients(analytic, tmp_path):
    save_model(analytic, tmp_path / "m.json")
    with pytest.raises(ValueError):
        kkt_violation(load_model(tmp_path / "m.json"), TWO_POINT)


def test_xor_is_not_linearly_separable():
    pts = [(0, 0), (1, 1), (0, 1), (1, 0)]
    labels = [1, 1, -1, -1]
    assert best_halfplane_accuracy(pts, labels) == 0.75
    samples = [LabeledSample((a, b, 0, 0, 0), t) for (a, b), t in zip(pts, labels)]
    model = train_smo(samples, TrainConfig(c=10))
    acc = np.mean([predict(model, s.x) == s.y for s in samples])
    assert acc <= 0.75


@pytest.mark.parametrize("seed", range(12))
def test_matches_exact_qp(seed):
    samples, X, y, c = random_problem(seed)
    model = train_smo(samples, TrainConfig(c=c))
    _, best = dual_active_set(X, y, c)
    got = dual_objective(samples, model.alphas)
    assert abs(got - best) <= 1e-4 * (1 + abs(best))
    assert kkt_violation(model, samples) <= 1e-3
    assert float(np.sum(model.alphas * y)) == 0.0
    assert (model.alphas >= 0).all() and (model.alphas <= c).all()


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_exact_qp_agrees_with_projected_gradient(seed):
    _, X, y, c = random_problem(seed)
    a_pg, v_pg = dual_projected_gradient(X, y, c, iters=3000)
    _, v_ex = dual_active_set(X, y, c)
    assert v_pg == pytest.approx(v_ex, abs=1e-5 * (1 + abs(v_ex)))
    assert v_pg == pytest.approx(dual_value(X, y, a_pg))


@pytest.mark.parametrize("seed", range(20))
def test_weak_duality(seed):
    # the gap scales like n * c * kkt_tol, so the bound is checked at a tight tolerance
    samples, _, _, c = random_problem(seed)
    model = train_smo(samples, TrainConfig(c=c, kkt_tol=1e-5))
    primal = primal_objective(model, samples)
    dual = dual_objective(samples, model.alphas)
    assert primal >= dual - 1e-9
    assert primal - dual <= 1e-3 * (1 + abs(dual))


def test_dual_never_decreases_across_passes():
    samples, _, _, _ = random_problem(7)
    samples = samples * 3  # more pairs to update
    values = [dual_objective(samples, train_smo(samples, TrainConfig(c=1.0, max_passes=k)).alphas)
              for k in range(1, 8)]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


@given(st.integers(0, 10_000), st.sampled_from([0.1, 1.0, 10.0]))
def test_constraints_hold_exactly(seed, c):
    samples, _, y, _ = random_problem(seed)
    model = train_smo(samples, TrainConfig(c=c, seed=seed))
    assert float(np.sum(model.alphas * y)) == 0.0
    assert (model.alphas >= 0).all() and (model.alphas <= c).all()
    w = (model.alphas * y) @ np.array([s.x for s in samples])
    assert np.abs(w - model.weights).max() <= 1e-9


@given(st.floats(0.01, 100.0))
def test_two_point_labels_survive_scaling(k):
    scaled = [LabeledSample(tuple(k * v for v in s.x), s.y) for s in TWO_POINT]
    model = train_smo(scaled, TrainConfig(c=10 / k**2))
    assert [predict(model, s.x) for s in scaled] == [FERTILE, INFERTILE]


def test_training_is_deterministic():
    samples, *_ = random_problem(3)
    a = train_smo(samples, TrainConfig(seed=5))
    b = train_smo(samples, TrainConfig(seed=5))
    assert model_to_dict(a) == model_to_dict(b)


def test_standardized_training_predicts_in_raw_space():
    samples = [LabeledSample((100 + i, 5000.0 + 10 * i), 1 if i >= 5 else -1) for i in range(10)]
    model = train_smo(samples, TrainConfig(standardize=True))
    assert all(predict(model, s.x) == s.y for s in samples)


@pytest.mark.parametrize("bad", [
    [],
    [LabeledSample((1.0,), 1), LabeledSample((2.0,), 1)],
    [LabeledSample((1.0,), 1), LabeledSample((2.0, 3.0), -1)],
    [LabeledSample((float("nan"),), 1), LabeledSample((2.0,), -1)],
])
def test_bad_training_sets(bad):
    with pytest.raises(TrainingDataError):
        train_smo(bad)


@pytest.mark.parametrize("kwargs", [dict(c=0), dict(kkt_tol=0), dict(max_passes=0)])
def test_bad_train_config(kwargs):
    with pytest.raises(TrainingDataError):
        TrainConfig(**kwargs)


def test_label_validation():
    with pytest.raises(TrainingDataError):
        LabeledSample((1.0,), 0)


# --- persistence ------------------------------------------------------------

@pytest.mark.parametrize("standardize", [False, True])
def test_model_json_round_trip(tmp_path, standardize):
    samples, *_ = random_problem(11)
    model = train_smo(samples, TrainConfig(standardize=standardize))
    save_model(model, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    assert model_to_dict(back) == model_to_dict(model)
    assert np.array_equal(back.weights, model.weights) and back.bias == model.bias
    for s in samples:
        assert decision_value(back, s.x) == decision_value(model, s.x)


def test_model_json_schema(analytic):
    d = model_to_dict(analytic)
    assert set(d) >= {"weights", "bias", "c", "support_vectors", "feature_order", "standardize"}
    assert d["feature_order"] == ["mean", "entropy", "variance", "skewness", "kurtosis"]
    assert {"x", "y", "alpha"} == set(d["support_vectors"][0])
    assert model_from_dict(d).support_x.shape == (2, 5)
