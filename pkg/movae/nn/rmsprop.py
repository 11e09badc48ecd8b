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
This module performs the RMSProp parameter update.
"""
import numpy as np

from ..movaeexception import MovaeArgumentError
from ..movaeexception import MovaeDimensionError
from ..movaeexception import MovaeNumericalError


class RmsPropState(object):
    """
    Hyperparameters and running mean of squared gradients.

    The cache is created on the first step, one zero array per parameter.

    Args:
        learning_rate (float): step size, > 0
        rho (float): decay of the running mean, in (0, 1)
        epsilon (float): denominator fuzz, > 0

    Raises:
        MovaeArgumentError: on an invalid hyperparameter

    Example:
        state = RmsPropState(learning_rate=0.001)
    """

    def __init__(self, learning_rate=0.001, rho=0.9, epsilon=1e-7):
        if not learning_rate > 0:
            raise MovaeArgumentError(
                "RmsPropState", "learning_rate must be > 0, got %r" %
                (learning_rate,))
        if not 0 < rho < 1:
            raise MovaeArgumentError(
                "RmsPropState", "rho must be in (0, 1), got %r" % (rho,))
        if not epsilon > 0:
            raise MovaeArgumentError(
                "RmsPropState", "epsilon must be > 0, got %r" % (epsilon,))
        self.learning_rate = learning_rate
        self.rho = rho
        self.epsilon = epsilon
        self.cache = None

    def reset(self):
        self.cache = None


def rmsprop_step(parameters, gradients, state):
    """
    Applies one RMSProp update to every parameter, in place.

    cache = rho * cache + (1 - rho) * g**2
    param = param - lr * g / (sqrt(cache) + epsilon)

    Args:
        parameters (list of numpy.ndarray): parameters, updated in place
        gradients (list of numpy.ndarray): gradients, same shapes
        state (RmsPropState): optimizer state, updated in place

    Returns:
        (list of numpy.ndarray, RmsPropState)

    Raises:
        MovaeDimensionError: if parameter and gradient shapes differ
        MovaeNumericalError: on a non-finite gradient, naming its index

    Example:
        rmsprop_step(model.parameters(), grads, state)
    """
    if len(parameters) != len(gradients):
        raise MovaeDimensionError(
            "rmsprop_step", "%d parameters for %d gradients" %
            (len(parameters), len(gradients)))
    for index, (param, grad) in enumerate(zip(parameters, gradients)):
        if param.shape != grad.shape:
            raise MovaeDimensionError(
                "rmsprop_step", "parameter %d has shape %s, gradient %s" %
                (index, tuple(param.shape), tuple(grad.shape)))
        if not np.all(np.isfinite(grad)):
            raise MovaeNumericalError(
                "rmsprop_step", "non-finite gradient for parameter %d" %
                index)

    if state.cache is None:
        state.cache = [np.zeros_like(param) for param in parameters]

    rho = state.rho
    for param, grad, cache in zip(parameters, gradients, state.cache):
        grad = grad.astype(param.dtype, copy=False)
        cache *= rho
        cache += (1 - rho) * grad * grad
        param -= state.learning_rate * grad / (np.sqrt(cache) +
                                               state.epsilon)
    return parameters, state
