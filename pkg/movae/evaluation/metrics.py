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
This module performs the image-to-reconstruction distance computations
and the accuracy of a list of predictions.
"""
import numpy as np

from ..movaeexception import MovaeArgumentError
from ..movaeexception import MovaeDimensionError
from ..movaeexception import MovaeDomainError

PCC = "pcc"
RMSE = "rmse"
METRIC_KINDS = (PCC, RMSE)

# distance given to a pair whose correlation is undefined
WORST_PCC_DISTANCE = 2.0


def metric_kind_check(kind, caller="metric_kind_check"):
    """
    Raises MovaeArgumentError unless kind is "pcc" or "rmse".
    """
    if kind not in METRIC_KINDS:
        raise MovaeArgumentError(
            caller, "unknown metric '%s', valid values are %s" %
            (kind, ", ".join(METRIC_KINDS)))
    return kind


def _pair_check(a, b, caller, minimum):
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise MovaeDimensionError(caller, "vectors of length %d and %d" %
                                  (a.size, b.size))
    if a.size < minimum:
        raise MovaeDimensionError(caller, "vectors need length >= %d" %
                                  minimum)
    return a, b


def pcc(a, b):
    """
    Pearson correlation coefficient of two vectors.

    Args:
        a (array like): vector of length >= 2
        b (array like): vector of the same length

    Returns:
        float: r in [-1, 1]

    Raises:
        MovaeDimensionError: on a length mismatch or length < 2
        MovaeDomainError: if a or b has zero variance

    Example:
        pcc([1, 2, 3], [3, 2, 1])  # -> -1.0
    """
    a, b = _pair_check(a, b, "pcc", 2)
    da = a - a.mean()
    db = b - b.mean()
    saa = np.dot(da, da)
    sbb = np.dot(db, db)
    if saa == 0 or sbb == 0:
        raise MovaeDomainError("pcc", "correlation of a constant vector")
    r = np.dot(da, db) / np.sqrt(saa * sbb)
    return float(min(max(r, -1.0), 1.0))


def rmse(a, b):
    """
    Root mean squared difference of two vectors.

    Args:
        a (array like): vector of length >= 1
        b (array like): vector of the same length

    Returns:
        float

    Raises:
        MovaeDimensionError: on a length mismatch or empty vectors

    Example:
        rmse([0, 0], [3, 4])  # -> 3.5355
    """
    a, b = _pair_check(a, b, "rmse", 1)
    diff = a - b
    return float(np.sqrt(np.mean(diff * diff)))


def distance(a, b, kind=PCC):
    """
    Distance between an image and its reconstruction.

    pcc gives 1 - r, in [0, 2], and 2 when r is undefined. rmse gives
    the rmse.

    Args:
        a (array like): image
        b (array like): reconstruction
        kind (string): "pcc" or "rmse"

    Returns:
        float

    Raises:
        MovaeArgumentError: on an unknown kind
        MovaeDimensionError: on a length mismatch

    Example:
        distance(image, xhat, "pcc")
    """
    metric_kind_check(kind, "distance")
    if kind == RMSE:
        return rmse(a, b)
    try:
        return 1.0 - pcc(a, b)
    except MovaeDomainError:
        return WORST_PCC_DISTANCE


def row_distances(images, reconstructions, kind=PCC):
    """
    distance() of every row pair of two [n x d] batches, vectorised.

    Args:
        images (numpy.ndarray): [n x d]
        reconstructions (numpy.ndarray): [n x d]
        kind (string): "pcc" or "rmse"

    Returns:
        numpy.ndarray: float64 vector of n distances

    Raises:
        MovaeArgumentError: on an unknown kind
        MovaeDimensionError: if the batches differ in shape
    """
    metric_kind_check(kind, "row_distances")
    a = np.asarray(images, dtype=np.float64)
    b = np.asarray(reconstructions, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2:
        raise MovaeDimensionError(
            "row_distances", "batches of shape %s and %s" %
            (tuple(a.shape), tuple(b.shape)))
    if kind == RMSE:
        diff = a - b
        return np.sqrt(np.mean(diff * diff, axis=1))

    da = a - a.mean(axis=1, keepdims=True)
    db = b - b.mean(axis=1, keepdims=True)
    saa = np.einsum("ij,ij->i", da, da)
    sbb = np.einsum("ij,ij->i", db, db)
    sab = np.einsum("ij,ij->i", da, db)
    degenerate = (saa == 0) | (sbb == 0)
    denom = np.sqrt(np.where(degenerate, 1.0, saa * sbb))
    r = np.clip(sab / denom, -1.0, 1.0)
    return np.where(degenerate, WORST_PCC_DISTANCE, 1.0 - r)


def accuracy(predictions, truths):
    """
    Fraction of predictions equal to their truth.

    Args:
        predictions (list): predicted labels
        truths (list): true labels, same length

    Returns:
        float: accuracy in [0, 1]

    Raises:
        MovaeArgumentError: on a length mismatch or empty lists

    Example:
        accuracy([1, 2, 3], [1, 2, 4])  # -> 0.6667
    """
    predictions = list(predictions)
    truths = list(truths)
    if len(predictions) != len(truths):
        raise MovaeArgumentError(
            "accuracy", "%d predictions for %d truths" %
            (len(predictions), len(truths)))
    if not truths:
        raise MovaeArgumentError("accuracy", "no predictions to score")
    hits = sum(1 for p, t in zip(predictions, truths) if p == t)
    return hits / float(len(truths))
