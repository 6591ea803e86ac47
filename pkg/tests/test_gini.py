import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import ortho_group

from catgini import (
    DegeneratePredictorError,
    LabeledDataset,
    distance_correlation,
    distance_sums,
    gini_correlation,
    gmd,
)
from oracles import naive_gmd, naive_rho


def test_distance_sums_hand():
    s = distance_sums([0.0, 1.0, 3.0])
    assert s.total == 6.0
    assert s.row_sums.tolist() == [4.0, 3.0, 5.0]


def test_distance_sums_identical_rows():
    s = distance_sums(np.full((5, 3), 2.5))
    assert s.total == 0.0
    assert not s.row_sums.any()


def test_gmd_hand_values():
    assert gmd([0.0, 1.0, 3.0]) == 2.0
    assert gmd([7.0] * 4) == 0.0
    assert gmd([[0.0, 0.0], [3.0, 4.0]]) == 5.0


def test_rho_separated_classes():
    est = gini_correlation(LabeledDataset([0, 0, 1, 1], ["a", "a", "b", "b"]))
    assert est.delta == 2 / 3
    assert est.class_deltas.tolist() == [0.0, 0.0]
    assert est.gcov == 2 / 3
    assert est.rho == 1.0


def test_rho_identical_class_distributions():
    est = gini_correlation(LabeledDataset([0, 1, 0, 1], ["a", "a", "b", "b"]))
    assert est.delta == 2 / 3
    assert est.class_deltas.tolist() == [1.0, 1.0]
    assert est.gcov == pytest.approx(-1 / 3, abs=1e-15)
    assert est.rho == -0.5


def test_degenerate_predictor():
    with pytest.raises(DegeneratePredictorError, match="undefined"):
        gini_correlation(LabeledDataset(np.ones((4, 2)), [0, 0, 1, 1]))


def _random_labeled(rng, n_max=30, d_max=4):
    K = int(rng.integers(2, 4))
    sizes = rng.integers(2, max(3, n_max // K) + 1, size=K)
    labels = np.repeat(np.arange(K), sizes)
    rng.shuffle(labels)
    d = int(rng.integers(1, d_max + 1))
    x = rng.normal(size=(labels.size, d)) + labels[:, None] * rng.uniform(0, 2)
    return LabeledDataset(x, labels)


def test_matches_naive_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(40):
        d = _random_labeled(rng)
        rows, labels = d.features.tolist(), list(d.labels)
        est = gini_correlation(d)
        assert est.rho == pytest.approx(naive_rho(rows, labels), rel=1e-12, abs=1e-14)
        assert est.delta == pytest.approx(naive_gmd(rows), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1),
       shift=st.floats(-1e3, 1e3),
       scale=st.floats(1e-3, 1e3))
def test_translation_and_scale_invariance(seed, shift, scale):
    d = _random_labeled(np.random.default_rng(seed))
    base = gini_correlation(d).rho
    moved = LabeledDataset(d.features + shift, d.labels)
    scaled = LabeledDataset(d.features * scale, d.labels)
    assert abs(gini_correlation(moved).rho - base) <= 1e-10
    assert abs(gini_correlation(scaled).rho - base) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_orthogonal_invariance_and_upper_bound(seed):
    rng = np.random.default_rng(seed)
    d = _random_labeled(rng)
    base = gini_correlation(d).rho
    assert base <= 1.0
    if d.d > 1:
        U = ortho_group.rvs(d.d, random_state=rng)
        rotated = LabeledDataset(d.features @ U.T, d.labels)
        assert abs(gini_correlation(rotated).rho - base) <= 1e-8


def test_upper_bound_holds_with_ties():
    rng = np.random.default_rng(5)
    for _ in range(200):
        labels = np.repeat([0, 1, 2], rng.integers(2, 6, size=3))
        x = rng.integers(0, 3, size=(labels.size, 2)).astype(float)
        if np.all(x == x[0]):
            continue
        assert gini_correlation(LabeledDataset(x, labels)).rho <= 1.0 + 1e-15


def test_repeat_calls_bit_identical():
    d = _random_labeled(np.random.default_rng(9))
    a = gini_correlation(d)
    b = gini_correlation(LabeledDataset(np.array(d.features), d.labels))
    assert a.rho == b.rho and a.delta == b.delta
    np.testing.assert_array_equal(a.class_deltas, b.class_deltas)


def test_distance_correlation_examples():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(50, 2))
    assert distance_correlation(x, x) == pytest.approx(1.0, abs=1e-10)
    assert distance_correlation(np.ones((10, 1)), rng.normal(size=(10, 1))) == 0.0
    a, b = rng.normal(size=(2000, 1)), rng.normal(size=(2000, 1))
    assert distance_correlation(a, b) < 0.1


def test_distance_correlation_bounds():
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.normal(size=(15, 3))
        y = x[:, :1] ** 2 + rng.normal(size=(15, 1)) * 0.1
        r = distance_correlation(x, y)
        assert 0.0 <= r <= 1.0
