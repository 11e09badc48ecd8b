# Copyright 2017 Cisco Systems, Inc.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#  http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
This module performs the operations of a single class variational
autoencoder: encode, reparameterize, decode, the loss and its training.
"""
import logging
from collections import namedtuple

import numpy as np

from ..movaeexception import MovaeArgumentError
from ..movaeexception import MovaeDomainError
from ..movaeexception import MovaeNumericalError
from ..nn.dense import LINEAR, RELU, SIGMOID
from ..nn.dense import backward_pass
from ..nn.dense import dense_layer_create
from ..nn.dense import forward_pass
from ..nn.prng import sample_standard_normal
from ..nn.rmsprop import rmsprop_step
from ..utils.utils import positive_int_check
from ..utils.utils import width_check

log = logging.getLogger('movae')

_BCE_CLAMP = 1e-7
_MAX_BATCH = 128

LossBreakdown = namedtuple("LossBreakdown", ["reconstruction", "kl", "total"])


class VaeConfig(object):
    """
    Architecture and training length of a VAE.

    Args:
        input_dim (int): image width, 784 for 28x28 images
        hidden_dim (int): width of the encoder and decoder hidden layers
        latent_dim (int): width of the latent code
        epochs (int): epochs per training call
        batch_size (int): mini-batch size, None for min(128, |data|)

    Raises:
        MovaeArgumentError: if a dimension or epochs is < 1

    Example:
        config = VaeConfig(hidden_dim=256, latent_dim=50, epochs=40)
    """

    def __init__(self, input_dim=784, hidden_dim=256, latent_dim=50,
                 epochs=40, batch_size=None):
        positive_int_check(input_dim, "input_dim", "VaeConfig")
        positive_int_check(hidden_dim, "hidden_dim", "VaeConfig")
        positive_int_check(latent_dim, "latent_dim", "VaeConfig")
        positive_int_check(epochs, "epochs", "VaeConfig")
        if batch_size is not None:
            positive_int_check(batch_size, "batch_size", "VaeConfig")
        self.input_dim = int(input_dim)
        self.hidden_dim = int(hidden_dim)
        self.latent_dim = int(latent_dim)
        self.epochs = int(epochs)
        self.batch_size = None if batch_size is None else int(batch_size)

    def batch_size_get(self, n_samples):
        if self.batch_size is not None:
            return min(self.batch_size, n_samples)
        return min(_MAX_BATCH, n_samples)

    def __eq__(self, other):
        return isinstance(other, VaeConfig) and vars(self) == vars(other)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "VaeConfig(%s)" % ", ".join(
            "%s=%r" % item for item in sorted(vars(self).items()))


# architecture families
MNIST_FAMILY = dict(hidden_dim=256, latent_dim=50, epochs=40)
OMNIGLOT_FAMILY = dict(hidden_dim=784, latent_dim=100, epochs=50)


class VaeModel(object):
    """
    Encoder (phi) and decoder (theta) layers of one VAE.

    Args:
        encoder_hidden (DenseLayer): relu, input_dim -> hidden_dim
        mu_head (DenseLayer): linear, hidden_dim -> latent_dim
        logvar_head (DenseLayer): linear, hidden_dim -> latent_dim
        decoder_hidden (DenseLayer): relu, latent_dim -> hidden_dim
        decoder_out (DenseLayer): sigmoid, hidden_dim -> input_dim
    """
    layer_names = ("encoder_hidden", "mu_head", "logvar_head",
                   "decoder_hidden", "decoder_out")

    def __init__(self, encoder_hidden, mu_head, logvar_head,
                 decoder_hidden, decoder_out):
        self.encoder_hidden = encoder_hidden
        self.mu_head = mu_head
        self.logvar_head = logvar_head
        self.decoder_hidden = decoder_hidden
        self.decoder_out = decoder_out

    @property
    def input_dim(self):
        return self.encoder_hidden.fan_in

    @property
    def latent_dim(self):
        return self.mu_head.fan_out

    def layers(self):
        return [getattr(self, name) for name in self.layer_names]

    def parameters(self):
        """Weights and biases of every layer, in layer_names order."""
        params = []
        for layer in self.layers():
            params.extend(layer.parameters())
        return params

    def astype(self, dtype):
        return VaeModel(*[layer.astype(dtype) for layer in self.layers()])

    def copy(self):
        return VaeModel(*[layer.copy() for layer in self.layers()])


def vae_create(config, prng):
    """
    creates a freshly initialised VAE

    Args:
        config (VaeConfig): architecture
        prng (Prng): random stream for the weights

    Returns:
        VaeModel

    Example:
        model = vae_create(VaeConfig(), Prng(1))
    """
    return VaeModel(
        dense_layer_create(config.input_dim, config.hidden_dim, RELU, prng),
        dense_layer_create(config.hidden_dim, config.latent_dim, LINEAR,
                           prng),
        dense_layer_create(config.hidden_dim, config.latent_dim, LINEAR,
                           prng),
        dense_layer_create(config.latent_dim, config.hidden_dim, RELU, prng),
        dense_layer_create(config.hidden_dim, config.input_dim, SIGMOID,
                           prng))


def _encode(model, x):
    width_check(x, model.input_dim, "encode")
    hidden, hidden_caches = forward_pass([model.encoder_hidden], x)
    mu, mu_caches = forward_pass([model.mu_head], hidden)
    logvar, logvar_caches = forward_pass([model.logvar_head], hidden)
    return mu, logvar, (hidden_caches, mu_caches, logvar_caches)


def encode(model, x):
    """
    Maps a batch of images to the parameters of q(z|x).

    Args:
        model (VaeModel)
        x (numpy.ndarray): [batch x input_dim] images

    Returns:
        (numpy.ndarray, numpy.ndarray): mu and logvar, [batch x latent_dim]

    Raises:
        MovaeDimensionError: if x does not have input_dim columns

    Example:
        mu, logvar = encode(model, images)
    """
    mu, logvar, _ = _encode(model, x)
    return mu, logvar


def reparameterize(mu, logvar, eps):
    """
    Returns z = mu + exp(0.5 * logvar) * eps.

    Args:
        mu (numpy.ndarray)
        logvar (numpy.ndarray)
        eps (numpy.ndarray): noise, same shape as mu

    Returns:
        numpy.ndarray

    Example:
        z = reparameterize(mu, logvar, np.zeros_like(mu))  # z == mu
    """
    return mu + np.exp(0.5 * logvar) * eps


def decode(model, z):
    """
    Maps latent codes to images with values in (0, 1).

    Outputs are clipped to [1e-7, 1 - 1e-7], float32 included.

    Args:
        model (VaeModel)
        z (numpy.ndarray): [batch x latent_dim]

    Returns:
        numpy.ndarray: [batch x input_dim]

    Raises:
        MovaeDimensionError: if z does not have latent_dim columns

    Example:
        images = decode(model, z)
    """
    width_check(z, model.latent_dim, "decode", what="z")
    xhat, _ = forward_pass([model.decoder_hidden, model.decoder_out], z)
    return np.clip(xhat, _BCE_CLAMP, 1 - _BCE_CLAMP)


def reconstruct(model, x):
    """
    Deterministic reconstruction, decoding z = mu.

    Args:
        model (VaeModel)
        x (numpy.ndarray): [batch x input_dim] images

    Returns:
        numpy.ndarray: [batch x input_dim] reconstructions

    Raises:
        MovaeDimensionError: if x does not have input_dim columns

    Example:
        xhat = reconstruct(model, images)
    """
    mu, _ = encode(model, x)
    return decode(model, mu)


def vae_loss(x, xhat, mu, logvar):
    """
    Negative variational lower bound of a batch, averaged over samples.

    reconstruction is the pixel-summed binary cross-entropy,
    kl = -0.5 * sum(1 + logvar - mu**2 - exp(logvar)).

    Args:
        x (numpy.ndarray): targets with values in [0, 1]
        xhat (numpy.ndarray): reconstructions, clamped to [1e-7, 1 - 1e-7]
        mu (numpy.ndarray): latent means
        logvar (numpy.ndarray): latent log variances

    Returns:
        LossBreakdown

    Raises:
        MovaeDomainError: if x has values outside [0, 1]

    Example:
        loss = vae_loss(x, xhat, mu, logvar)
        loss.total
    """
    if np.any(x < 0) or np.any(x > 1):
        raise MovaeDomainError("vae_loss",
                               "target pixels must lie in [0, 1]")
    x = np.asarray(x, dtype=np.float64)
    clamped = np.clip(np.asarray(xhat, dtype=np.float64),
                      _BCE_CLAMP, 1 - _BCE_CLAMP)
    mu = np.asarray(mu, dtype=np.float64)
    logvar = np.asarray(logvar, dtype=np.float64)
    batch = x.shape[0]

    bce = -(x * np.log(clamped) + (1 - x) * np.log(1 - clamped))
    reconstruction = bce.sum() / batch
    kl_terms = -0.5 * (1 + logvar - mu * mu - np.exp(logvar))
    # each term is >= 0; clip rounding noise
    kl = max(kl_terms.sum() / batch, 0.0)
    return LossBreakdown(float(reconstruction), float(kl),
                         float(reconstruction + kl))


def vae_loss_gradients(model, x, eps):
    """
    Loss of a batch and its gradient for every model parameter.

    The noise eps is held fixed, so the gradient flows through the
    reparameterization into both heads.

    Args:
        model (VaeModel)
        x (numpy.ndarray): [batch x input_dim] images in [0, 1]
        eps (numpy.ndarray): [batch x latent_dim] noise

    Returns:
        (LossBreakdown, list of numpy.ndarray): gradients follow
        model.parameters() order

    Raises:
        MovaeDimensionError: on a shape mismatch
        MovaeDomainError: if x has values outside [0, 1]
    """
    mu, logvar, (hidden_caches, mu_caches, logvar_caches) = _encode(model,
                                                                    x)
    z = reparameterize(mu, logvar, eps)
    decoder = [model.decoder_hidden, model.decoder_out]
    xhat, decoder_caches = forward_pass(decoder, z)
    loss = vae_loss(x, xhat, mu, logvar)

    batch = x.shape[0]
    clamped = np.clip(xhat, _BCE_CLAMP, 1 - _BCE_CLAMP)
    dxhat = (clamped - x) / (clamped * (1 - clamped)) / batch
    decoder_grads, dz = backward_pass(decoder, decoder_caches, dxhat)

    sigma = np.exp(0.5 * logvar)
    dmu = dz + mu / batch
    dlogvar = dz * eps * 0.5 * sigma - 0.5 * (1 - sigma * sigma) / batch
    mu_grads, dhidden_mu = backward_pass([model.mu_head], mu_caches, dmu)
    logvar_grads, dhidden_logvar = backward_pass(
        [model.logvar_head], logvar_caches, dlogvar)
    hidden_grads, _ = backward_pass([model.encoder_hidden], hidden_caches,
                                    dhidden_mu + dhidden_logvar)

    gradients = []
    for layer_grads in (hidden_grads, mu_grads, logvar_grads,
                        decoder_grads):
        for dweights, dbias in layer_grads:
            gradients.extend([dweights, dbias])
    return loss, gradients


def train_epochs(model, data, config, optimizer_state, prng, epochs=None):
    """
    Trains model with shuffled mini-batch RMSProp on the total loss.

    Every step draws fresh noise for every sample of the batch.

    Args:
        model (VaeModel): model, updated in place
        data (numpy.ndarray): [n x input_dim] training images
        config (VaeConfig): epochs and batch size
        optimizer_state (RmsPropState): updated in place
        prng (Prng): stream for shuffling and noise
        epochs (int): overrides config.epochs when given

    Returns:
        (VaeModel, list of float): model and mean total loss per epoch

    Raises:
        MovaeArgumentError: if data is empty
        MovaeNumericalError: on a non-finite loss, naming the epoch

    Example:
        model, history = train_epochs(model, images, config,
                                      RmsPropState(), prng)
    """
    data = np.asarray(data)
    if data.ndim != 2 or data.shape[0] == 0:
        raise MovaeArgumentError("train_epochs", "training data is empty")
    width_check(data, model.input_dim, "train_epochs", what="data")
    if epochs is None:
        epochs = config.epochs
    data = data.astype(model.encoder_hidden.weights.dtype, copy=False)

    n_samples = data.shape[0]
    batch_size = config.batch_size_get(n_samples)
    history = []
    for epoch in range(epochs):
        order = prng.permutation(n_samples)
        total = 0.0
        for start in range(0, n_samples, batch_size):
            batch = data[order[start:start + batch_size]]
            eps = sample_standard_normal(
                prng, batch.shape[0] * model.latent_dim).reshape(
                    batch.shape[0], model.latent_dim).astype(batch.dtype)
            loss, gradients = vae_loss_gradients(model, batch, eps)
            if not np.isfinite(loss.total):
                raise MovaeNumericalError(
                    "train_epochs", "non-finite loss at epoch %d" % epoch)
            rmsprop_step(model.parameters(), gradients, optimizer_state)
            total += loss.total * batch.shape[0]
        history.append(total / n_samples)
        log.debug("epoch %d/%d loss %.4f", epoch + 1, epochs, history[-1])
    return model, history
