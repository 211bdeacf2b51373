import gzip
import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from serf import datasets as D
from serf.nn import mlp_spec
from serf.training import TrainConfig, train


def _labels(values, count=None):
    count = len(values) if count is None else count
    return struct.pack(">2I", D.LABEL_MAGIC, count) + bytes(values)


def test_image_scaling():
    raw = struct.pack(">4I", D.IMAGE_MAGIC, 1, 2, 2) + bytes([0, 128, 255, 64])
    assert D.parse_idx_images(raw).tolist() == [[0.0, 128 / 255, 1.0, 64 / 255]]


def test_label_magic_rejected_for_images():
    raw = struct.pack(">4I", D.LABEL_MAGIC, 1, 1, 1) + b"\0"
    with pytest.raises(D.IdxError, match="expected magic 0x00000803, got 0x00000801"):
        D.parse_idx_images(raw)


def test_truncated_images_report_byte_counts():
    raw = struct.pack(">4I", D.IMAGE_MAGIC, 2, 2, 2) + bytes(5)
    with pytest.raises(D.IdxError, match="5 bytes, header implies 8"):
        D.parse_idx_images(raw)


def test_labels():
    assert D.parse_idx_labels(_labels([7, 2, 1])).tolist() == [7, 2, 1]
    assert D.parse_idx_labels(_labels([])).shape == (0,)


def test_out_of_range_label_reports_index():
    with pytest.raises(D.IdxError, match="label 10 at index 2"):
        D.parse_idx_labels(_labels([1, 2, 10, 11]))


@given(st.binary(max_size=64))
def test_parsers_are_total(blob):
    for parse in (D.parse_idx_images, D.parse_idx_labels):
        try:
            parse(blob)
        except D.IdxError:
            pass


@given(st.binary(max_size=40))
def test_parsers_total_behind_valid_magic(tail):
    for magic, parse in ((D.IMAGE_MAGIC, D.parse_idx_images), (D.LABEL_MAGIC, D.parse_idx_labels)):
        try:
            parse(struct.pack(">I", magic) + tail)
        except D.IdxError:
            pass


@st.composite
def idx_datasets(draw):
    n = draw(st.integers(0, 20))
    pixels = draw(hnp.arrays(np.uint8, (n, 16)))
    labels = draw(hnp.arrays(np.uint8, n, elements=st.integers(0, 9)))
    return D.LabeledDataset(pixels / 255.0, labels.astype(np.int64))


@given(idx_datasets())
def test_idx_round_trip(ds):
    images = D.parse_idx_images(D.write_idx_images(ds.images, 4, 4))
    labels = D.parse_idx_labels(D.write_idx_labels(ds.labels))
    assert np.array_equal(images, ds.images)
    assert np.array_equal(labels, ds.labels)


def test_writer_rejects_bad_shapes():
    with pytest.raises(ValueError):
        D.write_idx_images(np.zeros((1, 6)), 2, 2)
    with pytest.raises(ValueError):
        D.write_idx_images(np.full((1, 4), 1.5))


def test_load_mnist_from_directory(tmp_path, monkeypatch):
    rng = np.random.default_rng(0)
    for split, (img, lbl) in D.MNIST_FILES.items():
        pixels = rng.integers(0, 256, size=(5, 784)) / 255.0
        (tmp_path / img).write_bytes(D.write_idx_images(pixels))
        (tmp_path / (lbl + ".gz")).write_bytes(gzip.compress(D.write_idx_labels(np.arange(5))))
    assert D.mnist_available(tmp_path)
    ds = D.load_mnist("test", tmp_path)
    assert ds.images.shape == (5, 784) and ds.labels.tolist() == [0, 1, 2, 3, 4]
    monkeypatch.setenv(D.DATA_DIR_ENV, str(tmp_path))
    assert D.mnist_available()
    monkeypatch.delenv(D.DATA_DIR_ENV)
    assert not D.mnist_available()
    with pytest.raises(FileNotFoundError):
        D.load_mnist("train")


@pytest.mark.skipif(not D.mnist_available(), reason="MNIST not on disk")
def test_official_mnist_shapes():
    ds = D.load_mnist("train")
    assert ds.images.shape == (60000, 784)
    assert 0.0 <= ds.images.min() and ds.images.max() <= 1.0


def test_blobs_deterministic_and_valid():
    a, b = D.synthetic_blobs(2, 100, 2, 7), D.synthetic_blobs(2, 100, 2, 7)
    assert np.array_equal(a.images, b.images) and np.array_equal(a.labels, b.labels)
    assert a.images.min() >= 0.0 and a.images.max() <= 1.0
    assert not np.array_equal(a.images, D.synthetic_blobs(2, 100, 2, 8).images)


@pytest.mark.parametrize("classes,dim", [(2, 2), (3, 2), (4, 50), (10, 784)])
def test_blobs_linearly_separable(classes, dim):
    tr, te = D.synthetic_blobs(classes, 100, dim, 1), D.synthetic_blobs(classes, 50, dim, 2)
    # one identity hidden layer composed with the output map is a linear model
    spec = mlp_spec(dim, classes, [classes], "identity")
    res = train(spec, tr, te, TrainConfig("sgd", 0.1, batch_size=32, epochs=10))
    assert res.test_accuracy >= 0.95


def test_empty_blobs_rejected_by_trainer():
    ds = D.synthetic_blobs(3, 0, 4, 0)
    assert len(ds) == 0
    with pytest.raises(ValueError, match="empty"):
        train(mlp_spec(4, 3, [2]), ds, ds, TrainConfig())


def test_blobs_validation():
    with pytest.raises(ValueError):
        D.synthetic_blobs(1, 10, 4, 0)


def test_batch_sizes():
    ds = D.synthetic_blobs(2, 5, 2, 0)
    assert [len(y) for _, y in D.batches(ds, 3)] == [3, 3, 3, 1]
    with pytest.raises(ValueError):
        D.batches(ds, 0)


@given(st.integers(0, 60), st.integers(1, 16), st.integers(0, 2**40), st.integers(0, 5))
def test_batches_cover_dataset_once(n, size, seed, epoch):
    ds = D.LabeledDataset(np.arange(n, dtype=float)[:, None], np.zeros(n, dtype=np.int64))
    got = [x[:, 0] for x, _ in D.batches(ds, size, seed, epoch)]
    again = [x[:, 0] for x, _ in D.batches(ds, size, seed, epoch)]
    flat = np.concatenate(got) if got else np.array([])
    assert sorted(flat.tolist()) == list(range(n))
    assert all(np.array_equal(a, b) for a, b in zip(got, again))


def test_epochs_reshuffle():
    ds = D.synthetic_blobs(2, 50, 2, 0)
    a = D.batches(ds, 100, 1, 0)[0][1]
    b = D.batches(ds, 100, 1, 1)[0][1]
    assert not np.array_equal(a, b)


def test_standardize_uses_given_stats():
    tr = D.synthetic_blobs(3, 20, 6, 0)
    s = tr.standardized()
    assert np.allclose(s.images.mean(axis=0), 0.0, atol=1e-12)
    te = D.synthetic_blobs(3, 5, 6, 1).standardized(tr.images.mean(axis=0), tr.images.std(axis=0))
    assert te.images.shape == (15, 6)


def test_dataset_length_mismatch():
    with pytest.raises(ValueError):
        D.LabeledDataset(np.zeros((3, 2)), np.zeros(2, dtype=np.int64))
