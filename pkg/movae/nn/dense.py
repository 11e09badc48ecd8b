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
This module performs the forward and backward passes of dense networks.

A network is a plain list of DenseLayer objects applied in order. The
gradients are written out by hand for relu, sigmoid and linear layers.
"""
from collections import namedtuple

import numpy as np
from scipy.special import expit

from ..movaeexception import MovaeArgumentError
from ..movaeexception import MovaeDimensionError
from .prng import init_glorot

RELU = "relu"
SIGMOID = "sigmoid"
LINEAR = "linear"

LayerCache = namedtuple("LayerCache", ["inputs", "pre_activation", "outputs"])


def _relu(pre):
    return np.maximum(pre, 0)


def _relu_grad(pre, out):
    return (pre > 0).astype(pre.dtype)


def _sigmoid_grad(pre, out):
    return out * (1 - out)


def _linear(pre):
    return pre


def _linear_grad(pre, out):
    return np.ones_like(pre)


_activations = {
    RELU: (_relu, _relu_grad),
    SIGMOID: (expit, _sigmoid_grad),
    LINEAR: (_linear, _linear_grad),
}


def activation_grad(activation, pre_activation, outputs=None):
    """
    Derivative of an activation, evaluated elementwise.

    Args:
        activation (string): "relu", "sigmoid" or "linear"
        pre_activation (numpy.ndarray): values the activation was applied to
        outputs (numpy.ndarray): activation outputs, computed when None

    Returns:
        numpy.ndarray

    Example:
        activation_grad("sigmoid", np.zeros(1))  # -> [0.25]
    """
    func, grad = _activations[activation]
    if outputs is None:
        outputs = func(pre_activation)
    return grad(pre_activation, outputs)


class DenseLayer(object):
    """
    Fully connected layer, outputs = activation(inputs . weights + bias).

    Args:
        weights (numpy.ndarray): [fan_in x fan_out] matrix
        bias (numpy.ndarray): [fan_out] vector
        activation (string): "relu", "sigmoid" or "linear"

    Raises:
        MovaeArgumentError: on an unknown activation
        MovaeDimensionError: if bias does not match weights
    """

    def __init__(self, weights, bias, activation):
        if activation not in _activations:
            raise MovaeArgumentError(
                "DenseLayer", "unknown activation '%s', valid values are "
                "%s" % (activation, sorted(_activations)))
        if weights.ndim != 2 or bias.shape != (weights.shape[1],):
            raise MovaeDimensionError(
                "DenseLayer", "weights %s and bias %s are inconsistent" %
                (tuple(weights.shape), tuple(bias.shape)))
        self.weights = weights
        self.bias = bias
        self._activation = activation

    @property
    def activation(self):
        return self._activation

    @property
    def fan_in(self):
        return self.weights.shape[0]

    @property
    def fan_out(self):
        return self.weights.shape[1]

    def parameters(self):
        return [self.weights, self.bias]

    def astype(self, dtype):
        return DenseLayer(self.weights.astype(dtype),
                          self.bias.astype(dtype),
                          self._activation)

    def copy(self):
        return self.astype(self.weights.dtype)


def dense_layer_create(fan_in, fan_out, activation, prng, dtype=np.float32):
    """
    creates a glorot initialised layer with zero bias

    Args:
        fan_in (int): input width
        fan_out (int): output width
        activation (string): "relu", "sigmoid" or "linear"
        prng (Prng): random stream
        dtype (numpy.dtype): parameter dtype

    Returns:
        DenseLayer

    Example:
        layer = dense_layer_create(784, 256, "relu", prng)
    """
    return DenseLayer(init_glorot(fan_in, fan_out, prng, dtype),
                      np.zeros(fan_out, dtype=dtype),
                      activation)


def forward_pass(network, inputs):
    """
    Runs a batch through every layer of network.

    Args:
        network (list of DenseLayer): layers in application order
        inputs (numpy.ndarray): [batch x fan_in of the first layer]

    Returns:
        (numpy.ndarray, list of LayerCache): outputs and per-layer caches

    Raises:
        MovaeDimensionError: if inputs do not fit the first layer

    Example:
        outputs, caches = forward_pass([hidden, out], x)
    """
    caches = []
    outputs = inputs
    for position, layer in enumerate(network):
        if outputs.ndim != 2 or outputs.shape[1] != layer.fan_in:
            raise MovaeDimensionError(
                "forward_pass", "layer %d expects width %d, got shape %s" %
                (position, layer.fan_in, tuple(outputs.shape)))
        layer_inputs = outputs
        pre = np.dot(layer_inputs, layer.weights) + layer.bias
        outputs = _activations[layer.activation][0](pre)
        caches.append(LayerCache(layer_inputs, pre, outputs))
    return outputs, caches


def backward_pass(network, caches, output_gradient):
    """
    Back-propagates the gradient of the network outputs.

    Args:
        network (list of DenseLayer): layers used by the forward pass
        caches (list of LayerCache): caches returned by forward_pass
        output_gradient (numpy.ndarray): d loss / d outputs

    Returns:
        (list, numpy.ndarray): [(d weights, d bias) per layer] and
                               d loss / d inputs

    Raises:
        MovaeDimensionError: if caches or gradient do not match network

    Example:
        grads, input_grad = backward_pass(network, caches, dloss)
    """
    if len(caches) != len(network):
        raise MovaeDimensionError(
            "backward_pass", "%d caches for %d layers" %
            (len(caches), len(network)))
    if output_gradient.shape != caches[-1].outputs.shape:
        raise MovaeDimensionError(
            "backward_pass", "output gradient has shape %s, outputs have %s"
            % (tuple(output_gradient.shape),
               tuple(caches[-1].outputs.shape)))

    gradients = [None] * len(network)
    upstream = output_gradient
    for position in range(len(network) - 1, -1, -1):
        layer = network[position]
        cache = caches[position]
        delta = upstream * activation_grad(
            layer.activation, cache.pre_activation, cache.outputs)
        gradients[position] = (np.dot(cache.inputs.T, delta),
                               delta.sum(axis=0))
        upstream = np.dot(delta, layer.weights.T)
    return gradients, upstream
