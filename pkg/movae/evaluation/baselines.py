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
This module performs the baselines scored on the same data as the
mixture: k-nearest neighbours and the random guess.
"""
from collections import Counter

import numpy as np

from ..movaeexception import MovaeArgumentError
from ..utils.utils import as_batch
from ..utils.utils import positive_int_check
from .metrics import accuracy


def _neighbour_vote(labels):
    """
    Majority label of neighbours sorted nearest first.

    On a vote tie the tied class met first, i.e. nearest, wins.
    """
    counts = Counter(labels)
    best = max(counts.values())
    for label in labels:
        if counts[label] == best:
            return label


def _train_check(train, k, caller):
    if train is None or len(train) == 0:
        raise MovaeArgumentError(caller, "training set is empty")
    positive_int_check(k, "k", caller)


def knn_predict(train, query, k=3):
    """
    k-nearest-neighbour label of one image, euclidean on raw pixels.

    Equal distances keep the lower training index first. With fewer
    than k training samples all of them vote.

    Args:
        train (LabeledDataset): training samples
        query (numpy.ndarray): image vector
        k (int): neighbours, >= 1

    Returns:
        label of the majority class

    Raises:
        MovaeArgumentError: if train is empty or k < 1

    Example:
        knn_predict(train, image, k=3)
    """
    return knn_predict_batch(train, query, k)[0]


def knn_predict_batch(train, queries, k=3):
    """
    knn_predict for every row of queries.

    Returns:
        list: predicted labels
    """
    _train_check(train, k, "knn_predict")
    queries = as_batch(queries, train.images.shape[1], "knn_predict")
    points = train.images.astype(np.float64)
    point_norms = np.einsum("ij,ij->i", points, points)
    k = min(k, len(train))
    predictions = []
    for query in queries.astype(np.float64):
        squared = point_norms - 2 * points.dot(query) + query.dot(query)
        nearest = np.argsort(squared, kind="stable")[:k]
        predictions.append(_neighbour_vote(
            [train.labels[index] for index in nearest]))
    return predictions


def knn_evaluate(train, test, k=3):
    """
    Accuracy of knn_predict on a labelled test set.
    """
    return accuracy(knn_predict_batch(train, test.images, k), test.labels)


def random_guess_accuracy(n_classes):
    """
    Expected accuracy of guessing uniformly among n_classes.

    Args:
        n_classes (int): number of classes, >= 1

    Returns:
        float: 1 / n_classes

    Raises:
        MovaeArgumentError: if n_classes < 1

    Example:
        random_guess_accuracy(5)  # -> 0.2
    """
    positive_int_check(n_classes, "n_classes", "random_guess_accuracy")
    return 1.0 / n_classes
