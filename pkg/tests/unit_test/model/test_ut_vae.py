import math

import numpy as np
import pytest
from mock import patch

from movae.evaluation.metrics import pcc
from movae.model.vae import LossBreakdown
from movae.model.vae import VaeConfig
from movae.model.vae import decode
from movae.model.vae import encode
from movae.model.vae import reconstruct
from movae.model.vae import reparameterize
from movae.model.vae import train_epochs
from movae.model.vae import vae_create
from movae.model.vae import vae_loss
from movae.model.vae import vae_loss_gradients
from movae.movaeexception import MovaeArgumentError
from movae.movaeexception import MovaeDimensionError
from movae.movaeexception import MovaeDomainError
from movae.movaeexception import MovaeNumericalError
from movae.nn.prng import Prng
from movae.nn.prng import sample_standard_normal
from movae.nn.rmsprop import RmsPropState

tiny = VaeConfig(input_dim=10, hidden_dim=4, latent_dim=3, epochs=5)


def _patterns(n, width=16):
    pattern = np.zeros(width, dtype=np.float32)
    pattern[::2] = 1.0
    return np.tile(pattern, (n, 1))


def test_vae_config_defaults_and_batch():
    config = VaeConfig()
    assert (config.input_dim, config.hidden_dim, config.latent_dim,
            config.epochs) == (784, 256, 50, 40)
    assert config.batch_size_get(1000) == 128
    assert config.batch_size_get(5) == 5
    assert VaeConfig(batch_size=16).batch_size_get(100) == 16
    assert VaeConfig() == VaeConfig()
    assert VaeConfig() != VaeConfig(latent_dim=10)


def test_vae_config_checks():
    with pytest.raises(MovaeArgumentError):
        VaeConfig(latent_dim=0)
    with pytest.raises(MovaeArgumentError):
        VaeConfig(batch_size=0)


def test_vae_shapes():
    model = vae_create(tiny, Prng(1))
    x = np.full((6, 10), 0.5, dtype=np.float32)
    mu, logvar = encode(model, x)
    assert mu.shape == (6, 3)
    assert logvar.shape == (6, 3)
    xhat = decode(model, mu)
    assert xhat.shape == (6, 10)
    assert np.all((xhat > 0) & (xhat < 1))
    assert len(model.parameters()) == 10


def _relu(v):
    return np.maximum(v, 0.0)


def _sigmoid(v):
    return 1.0 / (1.0 + np.exp(-v))


def test_encode_decode_match_hand_composition():
    model = vae_create(tiny, Prng(6)).astype(np.float64)
    x = Prng(7).random((4, 10))
    z = Prng(8).uniform(-2, 2, (4, 3))
    hidden = _relu(x.dot(model.encoder_hidden.weights) +
                   model.encoder_hidden.bias)
    mu = hidden.dot(model.mu_head.weights) + model.mu_head.bias
    logvar = hidden.dot(model.logvar_head.weights) + model.logvar_head.bias
    latent = _relu(z.dot(model.decoder_hidden.weights) +
                   model.decoder_hidden.bias)
    xhat = _sigmoid(latent.dot(model.decoder_out.weights) +
                    model.decoder_out.bias)

    got_mu, got_logvar = encode(model, x)
    assert np.allclose(got_mu, mu, rtol=0, atol=1e-6)
    assert np.allclose(got_logvar, logvar, rtol=0, atol=1e-6)
    assert np.allclose(decode(model, z), xhat, rtol=0, atol=1e-6)


def test_vae_create_reproducible():
    first = vae_create(tiny, Prng(21)).parameters()
    second = vae_create(tiny, Prng(21)).parameters()
    for a, b in zip(first, second):
        assert np.array_equal(a, b)


def test_encode_width_check():
    model = vae_create(tiny, Prng(1))
    expected_error_message = ("encode failed, error: input has shape (2, 9),"
                              " expected (batch, 10)")
    with pytest.raises(MovaeDimensionError) as error:
        encode(model, np.zeros((2, 9)))
    assert error.value.message == expected_error_message
    with pytest.raises(MovaeDimensionError):
        decode(model, np.zeros((2, 4)))


def test_reparameterize():
    mu = np.array([[1.0, -2.0]])
    logvar = np.array([[0.0, math.log(4.0)]])
    assert np.array_equal(reparameterize(mu, logvar, np.zeros((1, 2))), mu)
    assert np.allclose(reparameterize(mu, logvar, np.ones((1, 2))),
                       [[2.0, 0.0]])


def test_reconstruct_is_deterministic():
    model = vae_create(tiny, Prng(2))
    x = Prng(3).random((4, 10))
    assert np.array_equal(reconstruct(model, x), reconstruct(model, x))
    mu, _ = encode(model, x)
    assert np.array_equal(reconstruct(model, x), decode(model, mu))


def test_vae_loss_kl_values():
    x = np.ones((1, 1))
    xhat = np.full((1, 1), 0.5)
    # case1: standard normal posterior
    loss = vae_loss(x, xhat, np.zeros((1, 2)), np.zeros((1, 2)))
    assert loss.kl == 0.0
    # case2: mu = 1 in one dimension
    loss = vae_loss(x, xhat, np.array([[1.0, 0.0]]), np.zeros((1, 2)))
    assert abs(loss.kl - 0.5) < 1e-12
    # case3: sigma**2 = e
    loss = vae_loss(x, xhat, np.zeros((1, 1)), np.ones((1, 1)))
    assert abs(loss.kl - 0.5 * (math.e - 2)) < 1e-12


def test_vae_loss_bce_half():
    x = np.array([[1.0, 0.0]])
    loss = vae_loss(x, np.full((1, 2), 0.5), np.zeros((1, 1)),
                    np.zeros((1, 1)))
    assert abs(loss.reconstruction - 2 * math.log(2)) < 1e-12
    assert abs(loss.total - loss.reconstruction) < 1e-12
    assert isinstance(loss, LossBreakdown)


def test_vae_loss_batch_average():
    x = np.array([[1.0], [1.0]])
    xhat = np.array([[0.5], [0.5]])
    loss = vae_loss(x, xhat, np.zeros((2, 1)), np.zeros((2, 1)))
    assert abs(loss.reconstruction - math.log(2)) < 1e-12


def test_vae_loss_saturation_is_finite():
    x = np.array([[1.0, 0.0]])
    xhat = np.array([[0.0, 1.0]])
    loss = vae_loss(x, xhat, np.zeros((1, 1)), np.zeros((1, 1)))
    assert np.isfinite(loss.total)
    assert abs(loss.reconstruction + 2 * math.log(1e-7)) < 1e-6


def test_vae_loss_domain_check():
    expected_error_message = ("vae_loss failed, error: target pixels must "
                              "lie in [0, 1]")
    with pytest.raises(MovaeDomainError) as error:
        vae_loss(np.array([[1.5]]), np.array([[0.5]]), np.zeros((1, 1)),
                 np.zeros((1, 1)))
    assert error.value.message == expected_error_message


def test_vae_loss_gradients_finite_difference():
    model = vae_create(tiny, Prng(5)).astype(np.float64)
    x = Prng(6).uniform(0.1, 0.9, (4, 10))
    eps = sample_standard_normal(Prng(7), 12).reshape(4, 3)
    _, gradients = vae_loss_gradients(model, x, eps)
    params = model.parameters()
    assert len(gradients) == len(params)
    h = 1e-4
    for param, grad in zip(params, gradients):
        assert grad.shape == param.shape
        numeric = np.zeros_like(param)
        for index in np.ndindex(param.shape):
            saved = param[index]
            param[index] = saved + h
            up = vae_loss_gradients(model, x, eps)[0].total
            param[index] = saved - h
            down = vae_loss_gradients(model, x, eps)[0].total
            param[index] = saved
            numeric[index] = (up - down) / (2 * h)
        assert np.allclose(numeric, grad, rtol=1e-3, atol=1e-5)


def test_train_epochs_reduces_loss():
    config = VaeConfig(input_dim=16, hidden_dim=8, latent_dim=2, epochs=60)
    model = vae_create(config, Prng(1))
    _, history = train_epochs(model, _patterns(20), config,
                              RmsPropState(learning_rate=0.01), Prng(2))
    assert len(history) == 60
    assert history[-1] < history[0]
    assert all(np.isfinite(history))


def test_train_epochs_reproducible():
    config = VaeConfig(input_dim=16, hidden_dim=8, latent_dim=2, epochs=3)
    runs = []
    for _ in range(2):
        model = vae_create(config, Prng(1))
        _, history = train_epochs(model, _patterns(10), config,
                                  RmsPropState(), Prng(2))
        runs.append((history, model.parameters()))
    assert runs[0][0] == runs[1][0]
    for a, b in zip(runs[0][1], runs[1][1]):
        assert np.array_equal(a, b)


def test_train_epochs_epoch_override():
    config = VaeConfig(input_dim=16, hidden_dim=8, latent_dim=2, epochs=3)
    model = vae_create(config, Prng(1))
    _, history = train_epochs(model, _patterns(4), config, RmsPropState(),
                              Prng(2), epochs=1)
    assert len(history) == 1


def test_train_epochs_empty_data():
    model = vae_create(tiny, Prng(1))
    with pytest.raises(MovaeArgumentError):
        train_epochs(model, np.zeros((0, 10)), tiny, RmsPropState(), Prng(1))


@patch('movae.model.vae.vae_loss_gradients')
def test_train_epochs_non_finite_loss(mock_gradients):
    model = vae_create(tiny, Prng(1))
    mock_gradients.return_value = (
        LossBreakdown(float("nan"), 0.0, float("nan")),
        [np.zeros_like(p) for p in model.parameters()])
    expected_error_message = ("train_epochs failed, error: non-finite loss "
                              "at epoch 0")
    with pytest.raises(MovaeNumericalError) as error:
        train_epochs(model, np.zeros((3, 10)), tiny, RmsPropState(),
                     Prng(1))
    assert error.value.message == expected_error_message


def test_train_epochs_memorizes_one_image():
    config = VaeConfig(input_dim=16, hidden_dim=8, latent_dim=2,
                       epochs=200)
    image = _patterns(1)
    model = vae_create(config, Prng(1))
    train_epochs(model, image, config, RmsPropState(learning_rate=0.01),
                 Prng(2))
    assert pcc(reconstruct(model, image)[0], image[0]) > 0.9


def test_train_epochs_descent_over_fifty_images():
    config = VaeConfig(input_dim=16, hidden_dim=8, latent_dim=2, epochs=40)
    prng = Prng(5)
    images = np.concatenate([_patterns(25), 1 - _patterns(25)])
    images = np.clip(images + prng.uniform(-0.05, 0.05, images.shape), 0, 1)
    model = vae_create(config, Prng(1))
    _, history = train_epochs(model, images.astype(np.float32), config,
                              RmsPropState(learning_rate=0.01), Prng(2))
    assert np.mean(history[-5:]) < np.mean(history[:5])


def test_decode_saturated_stays_open_interval():
    model = vae_create(tiny, Prng(1))
    model.decoder_out.bias[:5] = 50.0
    model.decoder_out.bias[5:] = -120.0
    xhat = decode(model, np.zeros((2, 3), dtype=np.float32))
    assert xhat.dtype == np.float32
    assert np.all(xhat > 0)
    assert np.all(xhat < 1)
