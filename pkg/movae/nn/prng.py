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
This module owns every source of randomness: the seedable Prng with
labelled child streams, gaussian noise and glorot initialisation.
"""
import zlib

import numpy as np

from ..movaeexception import MovaeArgumentError
from ..utils.utils import positive_int_check

_SEED_LIMIT = 2 ** 64
_U1_FLOOR = 1e-12


class Prng(object):
    """
    Deterministic pseudo random stream.

    Identical seeds give identical streams. child(label) derives an
    independent stream from (seed, label) alone, so children do not
    depend on how much of the parent stream has been consumed.

    Args:
        seed (int): seed in [0, 2**64)

    Raises:
        MovaeArgumentError: if seed is out of range

    Example:
        prng = Prng(7)
        member_prng = prng.child("member-3")
    """

    def __init__(self, seed):
        if int(seed) != seed or not 0 <= seed < _SEED_LIMIT:
            raise MovaeArgumentError(
                "Prng", "seed must be an integer in [0, 2**64), got %r" %
                (seed,))
        self.seed = int(seed)
        self._generator = np.random.Generator(np.random.PCG64(self.seed))

    def child(self, label):
        """
        Returns the stream derived from this seed and label.

        Args:
            label (string or int): stream label

        Returns:
            Prng
        """
        tag = zlib.crc32(str(label).encode("utf-8"))
        sequence = np.random.SeedSequence([self.seed, tag])
        return Prng(int(sequence.generate_state(1, np.uint64)[0]))

    def random(self, size=None):
        """Uniform draws in [0, 1)."""
        return self._generator.random(size)

    def uniform(self, low, high, size=None):
        return self._generator.uniform(low, high, size)

    def permutation(self, n):
        return self._generator.permutation(n)

    def choice(self, n, size, replace=False):
        return self._generator.choice(n, size=size, replace=replace)


def sample_standard_normal(prng, n):
    """
    Draws n standard normal values with the Box-Muller transform.

    Args:
        prng (Prng): random stream
        n (int): number of draws, >= 1

    Returns:
        numpy.ndarray: float64 vector of length n

    Raises:
        MovaeArgumentError: if n < 1

    Example:
        eps = sample_standard_normal(prng, 50)
    """
    positive_int_check(n, "n", "sample_standard_normal")
    pairs = (n + 1) // 2
    u1 = np.maximum(prng.random(pairs), _U1_FLOOR)
    u2 = prng.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    draws = np.empty(2 * pairs)
    draws[0::2] = radius * np.cos(angle)
    draws[1::2] = radius * np.sin(angle)
    return draws[:n]


def init_glorot(fan_in, fan_out, prng, dtype=np.float32):
    """
    Samples a glorot uniform weight matrix.

    Every entry is uniform in +-sqrt(6 / (fan_in + fan_out)).

    Args:
        fan_in (int): rows, >= 1
        fan_out (int): columns, >= 1
        prng (Prng): random stream
        dtype (numpy.dtype): dtype of the result

    Returns:
        numpy.ndarray: [fan_in x fan_out] matrix

    Raises:
        MovaeArgumentError: if fan_in or fan_out < 1

    Example:
        weights = init_glorot(784, 256, prng)
    """
    positive_int_check(fan_in, "fan_in", "init_glorot")
    positive_int_check(fan_out, "fan_out", "init_glorot")
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return prng.uniform(-limit, limit, (fan_in, fan_out)).astype(dtype)
