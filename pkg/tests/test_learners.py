import math
import random

import numpy as np
import pytest

from branch.dataset import MISSING, Label
from branch.errors import DegenerateData, NonFiniteLoss
from branch.learners import (
    LearnerSpec,
    LogRegModel,
    StumpModel,
    entropy_bits,
    logreg_gradient,
    logreg_loss,
    model_from_json,
    model_score,
    model_to_json,
    sigmoid,
    train_logreg,
    train_stump,
)

from conftest import make_dataset, random_dataset


def oracle_best_stump(samples, subset, schema):
    """Exhaustive (feature, midpoint) grid with independently coded entropy."""

    def ent(ys):
        n = len(ys)
        p = sum(ys)
        if n == 0 or p == 0 or p == n:
            return 0.0
        a = p / n
        return -(a * math.log2(a) + (1 - a) * math.log2(1 - a))

    best = None
    for name in subset:
        idx = schema.feature(name).index
        rows = [(s.values[idx], 1 if s.label is Label.POSITIVE else 0)
                for s in samples if s.values[idx] is not MISSING]
        if len(rows) < 2:
            continue
        distinct = sorted({v for v, _ in rows})
        parent = ent([y for _, y in rows])
        for lo, hi in zip(distinct, distinct[1:]):
            thr = (lo + hi) / 2
            left = [y for v, y in rows if v < thr]
            right = [y for v, y in rows if v >= thr]
            gain = parent - len(left) / len(rows) * ent(left) \
                - len(right) / len(rows) * ent(right)
            key = (-gain, idx, thr)
            if best is None or key < best[0]:
                best = (key, name, thr, gain)
    return best


def stump_dataset():
    return make_dataset([[1.0], [2.0], [8.0], [9.0]],
                        [False, False, True, True], feature_names=["g"])


class TestEntropy:
    def test_bounds_and_midpoint(self):
        assert entropy_bits(0, 10) == 0.0
        assert entropy_bits(10, 10) == 0.0
        assert entropy_bits(5, 10) == 1.0
        for pos in range(11):
            assert 0.0 <= entropy_bits(pos, 10) <= 1.0


class TestTrainStump:
    def test_fixture_threshold_and_gain(self):
        d = stump_dataset()
        # oracle first: enumerate all 3 midpoints, best gain is 1 bit at 5.0
        key, name, thr, gain = oracle_best_stump(d.samples, ("g",), d.schema)
        assert (name, thr, gain) == ("g", 5.0, 1.0)
        model = train_stump(d.samples, ("g",), d.schema)
        assert model.feature == "g"
        assert model.threshold == 5.0
        assert model.p_left == 1 / 4  # 0 of 2 positive, smoothed
        assert model.p_right == 3 / 4
        assert model.left_label is Label.NEGATIVE

    def test_tie_breaks_to_lower_feature_index(self):
        d = make_dataset([[1.0, 1.0], [2.0, 2.0], [8.0, 8.0], [9.0, 9.0]],
                         [False, False, True, True], feature_names=["f1", "f2"])
        model = train_stump(d.samples, ("f2", "f1"), d.schema)
        assert model.feature == "f1"

    def test_pure_node_degenerate(self):
        d = make_dataset([[1.0], [2.0]], [True, False], feature_names=["g"])
        pure = [s for s in d.samples if s.label is Label.POSITIVE]
        with pytest.raises(DegenerateData):
            train_stump(pure * 2, ("g",), d.schema)

    def test_constant_feature_degenerate(self):
        d = make_dataset([[5.0], [5.0]], [True, False], feature_names=["g"])
        with pytest.raises(DegenerateData):
            train_stump(d.samples, ("g",), d.schema)

    def test_missing_rows_excluded_per_feature(self):
        d = make_dataset([[1.0, None], [2.0, 5.0], [8.0, 5.0], [9.0, None]],
                         [False, False, True, True], feature_names=["g", "h"])
        model = train_stump(d.samples, ("g", "h"), d.schema)
        # h has only one distinct non-missing value, so g must win
        assert model.feature == "g"

    def test_matches_oracle_on_random_instances(self):
        rng = random.Random(9091)
        for trial in range(60):
            d = random_dataset(rng, n=rng.randrange(5, 25), numeric=3, categorical=0,
                               missing_rate=0.15, dataset_id=f"st{trial}")
            subset = tuple(f.name for f in d.features)
            want = oracle_best_stump(d.samples, subset, d.schema)
            if want is None or {s.label for s in d.samples} != {Label.POSITIVE, Label.NEGATIVE}:
                continue
            model = train_stump(d.samples, subset, d.schema)
            _, name, thr, gain = want
            assert model.feature == name
            assert model.threshold == thr

    def test_deterministic(self, rng):
        d = random_dataset(rng, n=20, categorical=0)
        subset = tuple(f.name for f in d.features)
        assert train_stump(d.samples, subset, d.schema) == train_stump(d.samples, subset, d.schema)


def separable_dataset():
    return make_dataset([[-2.0], [-1.0], [1.0], [2.0]],
                        [False, False, True, True], feature_names=["x"])


class TestTrainLogReg:
    def test_zero_init_probabilities_and_bias_gradient(self):
        d = separable_dataset()
        X = np.array([[v] for v in (-2.0, -1.0, 1.0, 2.0)])
        y = np.array([0.0, 0.0, 1.0, 1.0])
        grad_w, grad_b = logreg_gradient(X, y, np.zeros(1), 0.0, 0.0)
        assert grad_b == 0.0  # 0.5 - positive fraction, balanced data
        y_skew = np.array([0.0, 0.0, 0.0, 1.0])
        _, grad_b2 = logreg_gradient(X, y_skew, np.zeros(1), 0.0, 0.0)
        assert grad_b2 == pytest.approx(0.5 - 0.25)
        model = train_logreg(d.samples, LearnerSpec("logreg", ("x",), epochs=1,
                                                    learning_rate=1e-9), d.schema)
        assert model_score(model, d.samples[0], d.schema) == pytest.approx(0.5, abs=1e-6)

    def test_separable_reaches_perfect_training_accuracy(self):
        d = separable_dataset()
        spec = LearnerSpec("logreg", ("x",), learning_rate=0.5, epochs=500)
        model = train_logreg(d.samples, spec, d.schema)
        for s in d.samples:
            p = model_score(model, s, d.schema)
            assert (p >= 0.5) == (s.label is Label.POSITIVE)

    def test_gradient_matches_central_differences(self):
        rng = random.Random(5150)
        h = 1e-6
        worst = 0.0
        for _ in range(25):
            n, dims = rng.randrange(4, 12), rng.randrange(1, 4)
            X = np.array([[rng.uniform(-2, 2) for _ in range(dims)] for _ in range(n)])
            y = np.array([float(rng.random() < 0.5) for _ in range(n)])
            w = np.array([rng.uniform(-1, 1) for _ in range(dims)])
            b = rng.uniform(-1, 1)
            l2 = rng.choice([0.0, 0.1])
            grad_w, grad_b = logreg_gradient(X, y, w, b, l2)
            for j in range(dims):
                e = np.zeros(dims)
                e[j] = h
                fd = (logreg_loss(X, y, w + e, b, l2) - logreg_loss(X, y, w - e, b, l2)) / (2 * h)
                denom = max(abs(fd), abs(grad_w[j]), 1e-8)
                worst = max(worst, abs(fd - grad_w[j]) / denom)
            fd_b = (logreg_loss(X, y, w, b + h, l2) - logreg_loss(X, y, w, b - h, l2)) / (2 * h)
            worst = max(worst, abs(fd_b - grad_b) / max(abs(fd_b), abs(grad_b), 1e-8))
        assert worst <= 1e-5

    def test_loss_non_increasing_without_l2(self):
        rng = random.Random(33)
        d = random_dataset(rng, n=20, numeric=2, categorical=0, missing_rate=0.0)
        subset = tuple(f.name for f in d.features)
        losses = []
        for epochs in range(1, 30):
            spec = LearnerSpec("logreg", subset, learning_rate=0.01, epochs=epochs)
            m = train_logreg(d.samples, spec, d.schema)
            X = np.array([[s.values[i] for i in range(2)] for s in d.samples])
            Xs = (X - np.array(m.means)) / np.array(m.stds)
            y = np.array([1.0 if s.label is Label.POSITIVE else 0.0 for s in d.samples])
            losses.append(logreg_loss(Xs, y, np.array(m.weights), m.bias, 0.0))
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))

    def test_constant_feature_dropped_with_warning(self):
        d = make_dataset([[1.0, 7.0], [2.0, 7.0], [3.0, 7.0], [4.0, 7.0]],
                         [False, False, True, True], feature_names=["x", "k"])
        model = train_logreg(d.samples, LearnerSpec("logreg", ("x", "k")), d.schema)
        assert model.features == ("x",)
        assert any("constant" in w for w in model.warnings)

    def test_all_constant_degenerate(self):
        d = make_dataset([[7.0], [7.0]], [True, False], feature_names=["k"])
        with pytest.raises(DegenerateData):
            train_logreg(d.samples, LearnerSpec("logreg", ("k",)), d.schema)

    def test_missing_rows_dropped(self):
        d = make_dataset([[None], [-1.0], [1.0], [2.0]],
                         [False, False, True, True], feature_names=["x"])
        model = train_logreg(d.samples, LearnerSpec("logreg", ("x",)), d.schema)
        assert model.means == (2 / 3,)

    def test_divergence_raises(self):
        d = separable_dataset()
        spec = LearnerSpec("logreg", ("x",), learning_rate=1e308, epochs=5)
        with pytest.raises(NonFiniteLoss):
            train_logreg(d.samples, spec, d.schema)

    def test_single_class_degenerate(self):
        d = separable_dataset()
        pos = [s for s in d.samples if s.label is Label.POSITIVE]
        with pytest.raises(DegenerateData):
            train_logreg(pos, LearnerSpec("logreg", ("x",)), d.schema)

    def test_deterministic(self, rng):
        d = random_dataset(rng, n=15, numeric=2, categorical=0)
        spec = LearnerSpec("logreg", tuple(f.name for f in d.features), epochs=50)
        assert train_logreg(d.samples, spec, d.schema) == train_logreg(d.samples, spec, d.schema)


class TestModelScore:
    def test_stump_sides(self):
        d = make_dataset([[1.0], [9.0]], [True, False], feature_names=["g"])
        m = StumpModel("g", 5.0, Label.POSITIVE, p_left=0.9, p_right=0.2)
        assert model_score(m, d.samples[0], d.schema) == 0.9
        assert model_score(m, d.samples[1], d.schema) == 0.2

    def test_zero_logreg_scores_half(self):
        d = make_dataset([[3.0]], [True], feature_names=["g"])
        m = LogRegModel(("g",), (0.0,), 0.0, (0.0,), (1.0,))
        assert model_score(m, d.samples[0], d.schema) == 0.5

    def test_sigmoid_asymptote_without_overflow(self):
        assert sigmoid(35.0) > 1 - 1e-15
        assert sigmoid(-35.0) < 1e-15
        assert sigmoid(1000.0) == 1.0
        assert sigmoid(-1000.0) == 0.0


class TestModelJson:
    def test_stump_round_trip(self):
        m = StumpModel("g", 5.0, Label.NEGATIVE, 0.25, 0.75)
        assert model_from_json(model_to_json(m)) == m

    def test_logreg_round_trip_ignores_warnings(self):
        m = LogRegModel(("a", "b"), (0.5, -1.5), 0.25, (0.0, 1.0), (1.0, 2.0),
                        warnings=("something",))
        again = model_from_json(model_to_json(m))
        assert again == m  # warnings excluded from equality and serialization
        assert again.warnings == ()

    def test_unknown_kind(self):
        from branch.errors import SchemaViolation

        with pytest.raises(SchemaViolation):
            model_from_json({"kind": "forest"})
