import os

import numpy as np
import pytest

from hyperball.data import (
    Dataset,
    SynthConfig,
    generate_synthetic,
    load_dataset,
    mask_to_single_positive,
    save_dataset,
    train_eval_split,
)
from hyperball.errors import ConfigError, InvalidDatasetError, ParseError


@pytest.fixture(scope="module")
def big():
    return generate_synthetic(SynthConfig(samples=20000, seed=3))


def test_deterministic():
    a = generate_synthetic(SynthConfig(samples=300, seed=7))
    b = generate_synthetic(SynthConfig(samples=300, seed=7))
    np.testing.assert_array_equal(a.features, b.features)
    np.testing.assert_array_equal(a.full_labels, b.full_labels)
    np.testing.assert_array_equal(a.observed_pos, b.observed_pos)
    c = generate_synthetic(SynthConfig(samples=300, seed=8))
    assert not np.array_equal(a.features, c.features)


def test_noise_free_features_depend_only_on_labels():
    ds = generate_synthetic(SynthConfig(samples=500, noise_sigma=0.0, seed=1))
    _, inverse = np.unique(ds.full_labels, axis=0, return_inverse=True)
    for g in np.unique(inverse):
        rows = ds.features[inverse.ravel() == g]
        np.testing.assert_array_equal(rows, np.broadcast_to(rows[0], rows.shape))


def test_shapes_and_label_structure(big):
    cfg = SynthConfig()
    assert big.num_labels == 15 and big.feature_dim == cfg.d
    Y = big.full_labels
    assert np.all(Y.sum(axis=1) >= 2)
    # every active subclass has its superclass active
    for k in range(15):
        if k % 3:
            sub = Y[:, k] == 1
            assert np.all(Y[sub, cfg.super_of(k)] == 1)
    assert np.all(Y[np.arange(len(big)), big.observed_pos] == 1)


def test_planted_cooccurrence_rate(big):
    Y = big.full_labels
    given = Y[:, 1] == 1
    rate = Y[given, 4].mean()
    se = np.sqrt(0.7 * 0.3 / given.sum())
    assert abs(rate - 0.7) <= 3 * se


def test_masking_is_uniform():
    Y = np.zeros((10000, 4), dtype=np.int8)
    Y[:, [0, 2]] = 1
    pos = mask_to_single_positive(Y, 0)
    assert set(np.unique(pos)) == {0, 2}
    assert abs(np.mean(pos == 0) - 0.5) <= 0.05 * 0.5


def test_masking_rejects_empty_row():
    with pytest.raises(InvalidDatasetError):
        mask_to_single_positive(np.array([[1, 0], [0, 0]]), 0)


def test_split():
    ds = generate_synthetic(SynthConfig(samples=100, seed=0))
    tr, ev = train_eval_split(ds, 0.5, 11)
    assert len(tr) == len(ev) == 50
    assert set(tr.ids).isdisjoint(ev.ids)
    assert set(tr.ids) | set(ev.ids) == set(ds.ids)
    tr2, _ = train_eval_split(ds, 0.5, 11)
    assert tr.ids == tr2.ids
    with pytest.raises(ConfigError):
        train_eval_split(ds, 1.0, 0)


def test_config_validation():
    with pytest.raises(ConfigError, match="synth.samples"):
        SynthConfig(samples=0).validate()
    with pytest.raises(ConfigError, match="cooccur_pairs"):
        SynthConfig(cooccur_pairs=[(1, 40, 0.5)]).validate()
    with pytest.raises(ConfigError, match="probability"):
        SynthConfig(cooccur_pairs=[(1, 4, 1.5)]).validate()


def test_dataset_invariants():
    F = np.zeros((2, 3))
    with pytest.raises(InvalidDatasetError):
        Dataset(F, np.array([0, 3]), None, 3)
    with pytest.raises(InvalidDatasetError, match="no positive"):
        Dataset(F, np.array([0, 1]), np.array([[1, 0, 0], [0, 0, 0]]), 3)
    with pytest.raises(InvalidDatasetError, match="not positive"):
        Dataset(F, np.array([0, 1]), np.array([[1, 0, 0], [0, 0, 1]]), 3)


class TestFiles:
    def test_round_trip(self, tmp_path):
        ds = generate_synthetic(SynthConfig(samples=64, seed=2))
        paths = save_dataset(ds, tmp_path)
        back = load_dataset(paths["features"], paths["labels_single"], paths["labels_full"])
        np.testing.assert_array_equal(back.features, ds.features)
        np.testing.assert_array_equal(back.full_labels, ds.full_labels)
        np.testing.assert_array_equal(back.observed_pos, ds.observed_pos)
        assert back.ids == ds.ids
        with open(paths["features"], "rb") as fh:
            assert b"\r" not in fh.read()

    def test_rewrite_is_byte_identical(self, tmp_path):
        ds = generate_synthetic(SynthConfig(samples=32, seed=2))
        p1 = save_dataset(ds, tmp_path / "a")
        p2 = save_dataset(ds, tmp_path / "b")
        for key in p1:
            with open(p1[key], "rb") as f1, open(p2[key], "rb") as f2:
                assert f1.read() == f2.read()

    def _write(self, path, text):
        path.write_text(text, encoding="utf-8")
        return str(path)

    def test_index_equal_to_K_rejected(self, tmp_path):
        f = self._write(tmp_path / "f.csv", "id,f0\na,0.5\nb,1.0\n")
        s = self._write(tmp_path / "s.csv", "id,pos_idx\na,0\nb,2\n")
        y = self._write(tmp_path / "y.csv", "id,y0,y1\na,1,0\nb,0,1\n")
        with pytest.raises(InvalidDatasetError, match="line 3"):
            load_dataset(f, s, y)

    def test_row_without_positive_rejected(self, tmp_path):
        f = self._write(tmp_path / "f.csv", "id,f0\na,0.5\nb,1.0\n")
        s = self._write(tmp_path / "s.csv", "id,pos_idx\na,0\nb,1\n")
        y = self._write(tmp_path / "y.csv", "id,y0,y1\na,1,0\nb,0,0\n")
        with pytest.raises(InvalidDatasetError):
            load_dataset(f, s, y)

    def test_parse_error_location(self, tmp_path):
        f = self._write(tmp_path / "f.csv", "id,f0,f1\na,0.5,1\nb,1.0,oops\n")
        s = self._write(tmp_path / "s.csv", "id,pos_idx\na,0\nb,0\n")
        with pytest.raises(ParseError) as info:
            load_dataset(f, s)
        assert (info.value.line, info.value.column) == (3, 3)

    def test_ragged_row(self, tmp_path):
        f = self._write(tmp_path / "f.csv", "id,f0,f1\na,0.5\n")
        s = self._write(tmp_path / "s.csv", "id,pos_idx\na,0\n")
        with pytest.raises(ParseError) as info:
            load_dataset(f, s)
        assert info.value.line == 2

    def test_non_finite_rejected(self, tmp_path):
        f = self._write(tmp_path / "f.csv", "id,f0\na,nan\n")
        s = self._write(tmp_path / "s.csv", "id,pos_idx\na,0\n")
        with pytest.raises(ParseError):
            load_dataset(f, s)

    def test_mismatched_ids(self, tmp_path):
        f = self._write(tmp_path / "f.csv", "id,f0\na,0.5\nb,1\n")
        s = self._write(tmp_path / "s.csv", "id,pos_idx\nb,0\na,0\n")
        with pytest.raises(InvalidDatasetError, match="do not match"):
            load_dataset(f, s)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_dataset(os.path.join(tmp_path, "nope.csv"), os.path.join(tmp_path, "nope2.csv"))
