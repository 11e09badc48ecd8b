import numpy as np
import pytest

from movae.data.datasets import LabeledDataset
from movae.evaluation.baselines import knn_evaluate
from movae.evaluation.baselines import knn_predict
from movae.evaluation.baselines import knn_predict_batch
from movae.evaluation.baselines import random_guess_accuracy
from movae.movaeexception import MovaeArgumentError


def _line_dataset(positions, labels):
    images = np.zeros((len(positions), 2), dtype=np.float32)
    images[:, 0] = positions
    return LabeledDataset(images, labels)


def test_knn_predict_majority():
    train = _line_dataset([0.0, 0.1, 0.2, 0.9], ["a", "a", "b", "b"])
    assert knn_predict(train, np.array([0.05, 0.0]), k=3) == "a"
    assert knn_predict(train, np.array([0.95, 0.0]), k=1) == "b"


def test_knn_predict_tie_goes_to_nearest():
    # case1: 2 neighbours, one vote each, the nearest wins
    train = _line_dataset([0.0, 0.5], [1, 2])
    assert knn_predict(train, np.array([0.4, 0.0]), k=2) == 2
    assert knn_predict(train, np.array([0.1, 0.0]), k=2) == 1


def test_knn_predict_equal_distance_lower_index():
    train = _line_dataset([0.25, 0.75], [7, 3])
    assert knn_predict(train, np.array([0.5, 0.0]), k=1) == 7


def test_knn_predict_k_larger_than_train():
    train = _line_dataset([0.0, 0.1, 0.9], [0, 0, 1])
    assert knn_predict(train, np.array([1.0, 0.0]), k=10) == 0


def test_knn_evaluate():
    train = _line_dataset([0.0, 1.0], [0, 1])
    test = _line_dataset([0.1, 0.2, 0.8, 0.45], [0, 0, 1, 1])
    assert knn_predict_batch(train, test.images, k=1) == [0, 0, 1, 0]
    assert knn_evaluate(train, test, k=1) == 0.75


def test_knn_errors():
    empty = LabeledDataset(np.zeros((0, 2)), [])
    expected_error_message = "knn_predict failed, error: training set is empty"
    with pytest.raises(MovaeArgumentError) as error:
        knn_predict(empty, np.zeros(2))
    assert error.value.message == expected_error_message
    with pytest.raises(MovaeArgumentError):
        knn_predict(_line_dataset([0.0], [0]), np.zeros(2), k=0)


def test_random_guess_accuracy():
    assert random_guess_accuracy(5) == 0.2
    assert random_guess_accuracy(1623) == 1.0 / 1623
    with pytest.raises(MovaeArgumentError):
        random_guess_accuracy(0)
