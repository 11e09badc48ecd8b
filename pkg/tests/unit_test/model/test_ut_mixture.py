import numpy as np
import pytest
from mock import patch

from movae.data.datasets import LabeledDataset
from movae.evaluation.metrics import RMSE
from movae.model.mixture import Mixture
from movae.model.mixture import argmin_index
from movae.model.mixture import build_mixture
from movae.model.mixture import distance_matrix
from movae.model.mixture import member_reset
from movae.model.mixture import mixture_evaluate
from movae.model.mixture import mixture_train
from movae.model.mixture import predict
from movae.model.mixture import predict_batch
from movae.model.vae import VaeConfig
from movae.model.vae import vae_create
from movae.movaeexception import MovaeArgumentError
from movae.movaeexception import MovaeStateError
from movae.nn.prng import Prng

config = VaeConfig(input_dim=16, hidden_dim=8, latent_dim=2, epochs=150)
optimizer = {"learning_rate": 0.01}


def _bright(prng, n, top):
    images = np.full((n, 16), 0.1)
    if top:
        images[:, :8] = 0.9
    else:
        images[:, 8:] = 0.9
    images += prng.uniform(-0.05, 0.05, images.shape)
    return np.clip(images, 0, 1).astype(np.float32)


def _trained(seed=1, threads=1, metric="pcc"):
    prng = Prng(seed)
    mixture = build_mixture(["bottom", "top"], config, prng.child("init"),
                            metric=metric, optimizer=optimizer)
    train_sets = {"top": _bright(prng.child("top"), 10, True),
                  "bottom": _bright(prng.child("bottom"), 10, False)}
    mixture_train(mixture, train_sets, prng.child("train"), threads=threads)
    return mixture


def test_build_mixture_members_in_label_order():
    mixture = build_mixture([3, 0, 2, 1, 9, 8, 7, 6, 5, 4],
                            VaeConfig(input_dim=4, hidden_dim=2,
                                      latent_dim=1), Prng(1))
    assert mixture.labels == list(range(10))
    assert len(mixture) == 10
    assert not mixture.trained


def test_build_mixture_full_character_scale():
    labels = ["character-%04d" % index for index in range(1623)]
    mixture = build_mixture(labels, VaeConfig(input_dim=4, hidden_dim=2,
                                              latent_dim=1), Prng(2))
    assert len(mixture) == 1623
    assert mixture.labels == sorted(labels)


def test_build_mixture_reproducible():
    first = build_mixture([0, 1], config, Prng(4))
    second = build_mixture([1, 0], config, Prng(4))
    for label in (0, 1):
        for a, b in zip(first.model_get(label).parameters(),
                        second.model_get(label).parameters()):
            assert np.array_equal(a, b)


def test_build_mixture_errors():
    expected_error_message = ("build_mixture failed, error: a mixture needs "
                              "at least two classes")
    with pytest.raises(MovaeArgumentError) as error:
        build_mixture([0], config, Prng(1))
    assert error.value.message == expected_error_message
    with pytest.raises(MovaeArgumentError):
        build_mixture([0, 1, 1], config, Prng(1))
    with pytest.raises(MovaeArgumentError):
        Mixture([(1, None), (0, None)], config)
    with pytest.raises(MovaeArgumentError):
        build_mixture([0, 1], config, Prng(1), metric="cosine")


def test_argmin_index():
    assert argmin_index([0.4, 0.1, 0.3]) == 1
    assert argmin_index([0.2, 0.2]) == 0


def test_untrained_mixture_state_error():
    mixture = build_mixture([0, 1], config, Prng(1))
    expected_error_message = ("distance_matrix failed, error: mixture is "
                              "empty or untrained")
    with pytest.raises(MovaeStateError) as error:
        distance_matrix(mixture, np.zeros((1, 16)))
    assert error.value.message == expected_error_message
    with pytest.raises(MovaeStateError):
        predict(mixture, np.zeros(16))


def test_mixture_train_missing_class():
    mixture = build_mixture([0, 1], config, Prng(1))
    with pytest.raises(MovaeArgumentError):
        mixture_train(mixture, {0: np.zeros((2, 16))}, Prng(1))


def test_mixture_classifies_synthetic_classes():
    mixture = _trained()
    prng = Prng(99)
    test = LabeledDataset(
        np.concatenate([_bright(prng, 10, True), _bright(prng, 10, False)]),
        ["top"] * 10 + ["bottom"] * 10)
    assert mixture_evaluate(mixture, test) == 1.0
    assert predict(mixture, test.images[0]).label == "top"
    assert predict(mixture, test.images[-1]).label == "bottom"


def test_distance_matrix_consistency():
    mixture = _trained()
    images = _bright(Prng(7), 6, True)
    dist = distance_matrix(mixture, images)
    assert dist.shape == (6, 2)
    assert np.all((dist >= 0) & (dist <= 2))
    for row, image in zip(dist, images):
        assert np.array_equal(predict(mixture, image).distances, row)
    assert predict_batch(mixture, images) == [
        mixture.labels[argmin_index(row)] for row in dist]
    assert distance_matrix(mixture, np.zeros((0, 16))).shape == (0, 2)


def test_mixture_rmse_metric():
    mixture = _trained(metric=RMSE)
    images = _bright(Prng(8), 5, False)
    assert predict_batch(mixture, images) == ["bottom"] * 5


def test_mixture_train_thread_count_independent():
    single = _trained(threads=1)
    pooled = _trained(threads=2)
    for label in single.labels:
        for a, b in zip(single.model_get(label).parameters(),
                        pooled.model_get(label).parameters()):
            assert np.array_equal(a, b)


def test_member_reset():
    mixture = _trained()
    state = mixture.optimizer_states["top"]
    assert state.cache is not None
    model = member_reset(mixture, "top", Prng(5))
    assert mixture.model_get("top") is model
    fresh = vae_create(config, Prng(5))
    for a, b in zip(model.parameters(), fresh.parameters()):
        assert np.array_equal(a, b)
    assert mixture.optimizer_states["top"].cache is None
    assert mixture.optimizer_states["top"].learning_rate == 0.01
    with pytest.raises(MovaeArgumentError):
        member_reset(mixture, "left", Prng(5))


def test_distance_matrix_chunked_scoring():
    mixture = _trained()
    prng = Prng(8)
    images = np.concatenate([_bright(prng, 4, True),
                             _bright(prng, 3, False)])
    whole = distance_matrix(mixture, images)
    with patch('movae.model.mixture.SCORE_CHUNK', 3):
        chunked = distance_matrix(mixture, images)
    assert chunked.shape == (7, 2)
    assert np.allclose(chunked, whole, rtol=0, atol=1e-6)
    for row in range(7):
        single = distance_matrix(mixture, images[row:row + 1])
        assert np.allclose(chunked[row], single[0], rtol=0, atol=1e-6)
