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

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..movaeexception import MovaeArgumentError
from ..movaeexception import MovaeDimensionError

THREADS_ENV = "MOVAE_THREADS"


def width_check(array, width, caller, what="input"):
    """
    Checks that a 2-d batch has the expected number of columns.

    Args:
        array (numpy.ndarray): batch of row vectors
        width (int): expected number of columns
        caller (string): name of the caller function
        what (string): name of the checked array, used in the error

    Returns:
        None

    Raises:
        MovaeDimensionError: if array is not 2-d or width differs
    """
    if array.ndim != 2 or array.shape[1] != width:
        raise MovaeDimensionError(
            caller, "%s has shape %s, expected (batch, %d)" %
            (what, tuple(array.shape), width))


def as_batch(images, width, caller):
    """
    Returns images as a 2-d batch, promoting a single vector to one row.
    """
    images = np.asarray(images)
    if images.ndim == 1:
        images = images[np.newaxis, :]
    width_check(images, width, caller)
    return images


def positive_int_check(value, name, caller, minimum=1):
    if int(value) != value or value < minimum:
        raise MovaeArgumentError(
            caller, "'%s' must be an integer >= %d, got %r" %
            (name, minimum, value))


def threads_get():
    """
    Returns the worker thread cap read from MOVAE_THREADS.

    Returns:
        int: thread count, 1 when unset

    Raises:
        MovaeArgumentError: if MOVAE_THREADS is not a positive integer
    """
    value = os.environ.get(THREADS_ENV, "1")
    try:
        threads = int(value)
    except ValueError:
        threads = 0
    if threads < 1:
        raise MovaeArgumentError(
            "threads_get", "%s must be a positive integer, got '%s'" %
            (THREADS_ENV, value))
    return threads


def map_ordered(func, items, threads=None):
    """
    Applies func to every item, possibly on worker threads.

    Results come back in the order of items, whatever the thread count.

    Args:
        func (callable): function of one argument
        items (list): arguments
        threads (int): worker threads, MOVAE_THREADS when None

    Returns:
        list: func(item) for every item

    Example:
        recons = map_ordered(lambda model: reconstruct(model, x), models)
    """
    items = list(items)
    if threads is None:
        threads = threads_get()
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(func, items))
