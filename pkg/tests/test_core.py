import subprocess
import sys

import numpy as np
import pytest

from catgini import (
    DataError,
    LabeledDataset,
    PairedDataset,
    RngStream,
    concat_features,
    load_csv,
    load_paired_csv,
    write_csv,
)


def _write(tmp_path, text, name="d.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_load_csv_two_classes(tmp_path):
    path = _write(tmp_path, "z,f\na,0\na,0\nb,1\nb,1\n")
    d = load_csv(path, "z")
    assert d.n_classes == 2
    assert d.class_counts.tolist() == [2, 2]
    assert d.features[:, 0].tolist() == [0, 0, 1, 1]
    assert d.classes == ("a", "b")


def test_load_csv_three_classes_props(tmp_path):
    path = _write(tmp_path, "f,z\n1,c\n2,a\n3,b\n4,c\n5,a\n6,b\n")
    d = load_csv(path, 1)
    assert d.n_classes == 3
    assert d.classes == ("c", "a", "b")
    np.testing.assert_array_equal(d.class_props, [1 / 3, 1 / 3, 1 / 3])
    assert d.class_props.sum() == 1.0


def test_class_below_two_rejected(tmp_path):
    path = _write(tmp_path, "z,f\na,0\na,1\nb,1\n")
    with pytest.raises(DataError, match="class size below 2"):
        load_csv(path, "z")


def test_single_class_rejected():
    with pytest.raises(DataError, match="at least 2 classes"):
        LabeledDataset([1.0, 2.0, 3.0], ["a", "a", "a"])


def test_non_numeric_cell_reports_location(tmp_path):
    path = _write(tmp_path, "z,f,g\na,0,1\na,1,oops\nb,2,3\nb,3,4\n")
    with pytest.raises(DataError, match=r"row 2, column 'g'"):
        load_csv(path, "z")


@pytest.mark.parametrize("cell", ["", "nan", "inf"])
def test_missing_or_nonfinite_rejected(tmp_path, cell):
    path = _write(tmp_path, f"z,f\na,0\na,{cell}\nb,2\nb,3\n")
    with pytest.raises(DataError):
        load_csv(path, "z")


def test_missing_file_and_column(tmp_path):
    with pytest.raises(DataError, match="no such file"):
        load_csv(tmp_path / "nope.csv", "z")
    path = _write(tmp_path, "z,f\na,0\na,1\nb,2\nb,3\n")
    with pytest.raises(DataError, match="'label'"):
        load_csv(path, "label")


def test_load_paired(tmp_path):
    path = _write(tmp_path, "z,c1,c2\na,0,5\na,0,6\nb,1,7\nb,1,8\n")
    d = load_paired_csv(path, "z", ["c1"], ["c2"])
    assert (d.n, d.p, d.q) == (4, 1, 1)


def test_load_paired_overlap_and_empty(tmp_path):
    path = _write(tmp_path, "z,c1,c2\na,0,5\na,0,6\nb,1,7\nb,1,8\n")
    with pytest.raises(DataError, match="overlap"):
        load_paired_csv(path, "z", ["c1", "c2"], ["c2"])
    with pytest.raises(DataError, match="q must be >= 1"):
        load_paired_csv(path, "z", ["c1"], [])


def test_concat_features():
    d = PairedDataset([0, 0, 1, 1], [5, 5, 5, 5], ["a", "a", "b", "b"])
    w = concat_features(d)
    assert w.features.tolist() == [[0, 5], [0, 5], [1, 5], [1, 5]]
    assert w.labels == d.labels


def test_concat_order_and_round_trip():
    rng = np.random.default_rng(3)
    x, y = rng.normal(size=(6, 2)), rng.normal(size=(6, 3))
    d = PairedDataset(x, y, [0, 0, 1, 1, 2, 2])
    w = concat_features(d)
    assert w.d == 5
    np.testing.assert_array_equal(w.features[:, :2], x)
    np.testing.assert_array_equal(w.features[:, 2:], y)


def test_datasets_are_read_only():
    d = LabeledDataset([[0.0], [1.0], [2.0], [3.0]], [0, 0, 1, 1])
    with pytest.raises(ValueError):
        d.features[0, 0] = 9.0


def test_csv_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    feats = rng.normal(size=(8, 3)) * 10.0 ** rng.integers(-8, 8, size=(8, 3))
    d = LabeledDataset(feats, list("aabbccdd"))
    path = tmp_path / "rt.csv"
    write_csv(d, path)
    back = load_csv(path, "label")
    np.testing.assert_array_equal(back.features, d.features)
    assert back.labels == d.labels


def test_partition_stable_under_row_shuffle(tmp_path):
    rng = np.random.default_rng(1)
    feats = rng.normal(size=(9, 2))
    labels = list("abcabcabc")
    order = rng.permutation(9)
    a = LabeledDataset(feats, labels)
    b = LabeledDataset(feats[order], [labels[i] for i in order])
    for lab in "abc":
        ka, kb = a.classes.index(lab), b.classes.index(lab)
        rows_a = sorted(map(tuple, a.features[a.class_index[ka]]))
        rows_b = sorted(map(tuple, b.features[b.class_index[kb]]))
        assert rows_a == rows_b


def test_rng_stream_reproducible_and_distinct():
    a = RngStream(7, 3).generator.random(1000)
    b = RngStream(7, 3).generator.random(1000)
    c = RngStream(7, 4).generator.random(1000)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    # substreams are keyed by path, not by offsetting ids
    assert not np.array_equal(RngStream(7, 0).substream(3).generator.random(10),
                              RngStream(7, 3).generator.random(10))


def test_rng_streams_look_independent():
    a = RngStream(11, 0).generator.standard_normal(20000)
    b = RngStream(11, 1).generator.standard_normal(20000)
    # |corr| of independent N(0,1) samples of size 2e4 exceeds 0.03 with prob < 1e-5
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.03


def test_rng_stream_identical_across_processes():
    code = ("from catgini import RngStream;"
            "print(RngStream(123, 45).generator.random(10000).tobytes().hex())")
    outs = [subprocess.run([sys.executable, "-c", code], capture_output=True,
                           text=True, check=True).stdout for _ in range(2)]
    assert outs[0] == outs[1]
    assert outs[0].strip() == RngStream(123, 45).generator.random(10000).tobytes().hex()
