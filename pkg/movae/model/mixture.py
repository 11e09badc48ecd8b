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
This module performs the operations of the mixture classifier: one VAE
per class, and classification by the member that reconstructs an image
best.
"""
import logging
from collections import namedtuple

import numpy as np

from ..evaluation.metrics import PCC
from ..evaluation.metrics import accuracy
from ..evaluation.metrics import metric_kind_check
from ..evaluation.metrics import row_distances
from ..movaeexception import MovaeArgumentError
from ..movaeexception import MovaeStateError
from ..nn.rmsprop import RmsPropState
from ..utils.utils import as_batch
from ..utils.utils import map_ordered
from .vae import reconstruct
from .vae import train_epochs
from .vae import vae_create

log = logging.getLogger('movae')

Prediction = namedtuple("Prediction", ["label", "distances"])

# rows scored per reconstruct call; bounds the float64 temporaries
SCORE_CHUNK = 4096


class Mixture(object):
    """
    Ordered (label, VaeModel) members sharing one VaeConfig.

    Members are kept in ascending label order. That order fixes the
    column order of distance matrices and the tie-break of predictions.

    Args:
        members (list): (label, VaeModel) pairs, ascending unique labels
        config (VaeConfig): shared configuration
        metric (string): "pcc" or "rmse"
        optimizer (dict): RmsPropState keyword arguments
        trained (bool): whether every member has been trained

    Raises:
        MovaeArgumentError: on duplicate or unsorted labels, or an
                            unknown metric
    """

    def __init__(self, members, config, metric=PCC, optimizer=None,
                 trained=False):
        labels = [label for label, _ in members]
        if len(set(labels)) != len(labels):
            raise MovaeArgumentError("Mixture", "duplicate class labels")
        if labels != sorted(labels):
            raise MovaeArgumentError("Mixture",
                                     "members must be in label order")
        self.members = list(members)
        self.config = config
        self.metric = metric_kind_check(metric, "Mixture")
        self.optimizer = dict(optimizer or {})
        self.optimizer_states = dict(
            (label, RmsPropState(**self.optimizer)) for label in labels)
        self.trained = trained

    @property
    def labels(self):
        return [label for label, _ in self.members]

    def model_get(self, label):
        for member_label, model in self.members:
            if member_label == label:
                return model
        raise MovaeArgumentError("model_get", "no member for class '%s'" %
                                 (label,))

    def __len__(self):
        return len(self.members)


def build_mixture(class_labels, config, prng, metric=PCC, optimizer=None):
    """
    creates one freshly initialised VAE per class label

    Every member is initialised from its own stream prng.child(label).

    Args:
        class_labels (list): at least two distinct labels
        config (VaeConfig): member configuration
        prng (Prng): parent random stream
        metric (string): "pcc" or "rmse"
        optimizer (dict): RmsPropState keyword arguments

    Returns:
        Mixture

    Raises:
        MovaeArgumentError: on duplicate labels or fewer than two labels

    Example:
        mixture = build_mixture(range(10), VaeConfig(), Prng(1))
    """
    class_labels = list(class_labels)
    if len(set(class_labels)) != len(class_labels):
        raise MovaeArgumentError("build_mixture", "duplicate class labels")
    if len(class_labels) < 2:
        raise MovaeArgumentError("build_mixture",
                                 "a mixture needs at least two classes")
    members = [(label, vae_create(config, prng.child("member-%s" % label)))
               for label in sorted(class_labels)]
    return Mixture(members, config, metric=metric, optimizer=optimizer)


def member_reset(mixture, label, prng):
    """
    Reinitialises one member and its optimizer state.

    Args:
        mixture (Mixture)
        label: class label of the member
        prng (Prng): stream for the new weights

    Returns:
        VaeModel: the new member
    """
    for position, (member_label, _) in enumerate(mixture.members):
        if member_label == label:
            model = vae_create(mixture.config, prng)
            mixture.members[position] = (label, model)
            mixture.optimizer_states[label] = RmsPropState(
                **mixture.optimizer)
            return model
    raise MovaeArgumentError("member_reset", "no member for class '%s'" %
                             (label,))


def mixture_train(mixture, train_sets, prng, epochs=None, threads=None):
    """
    Trains every member on the images of its class.

    Members are independent: each uses its own optimizer state and the
    stream prng.child(label), so the result does not depend on threads.

    Args:
        mixture (Mixture): updated in place
        train_sets (dict): label -> [n x input_dim] images
        prng (Prng): parent random stream
        epochs (int): overrides config.epochs
        threads (int): worker threads, MOVAE_THREADS when None

    Returns:
        dict: label -> list of per-epoch losses

    Raises:
        MovaeArgumentError: if a member has no training images
        MovaeNumericalError: propagated from training

    Example:
        mixture_train(mixture, {0: zeros, 1: ones}, Prng(3))
    """
    for label in mixture.labels:
        if label not in train_sets or len(train_sets[label]) == 0:
            raise MovaeArgumentError(
                "mixture_train", "no training images for class '%s'" %
                (label,))

    def _train(member):
        label, model = member
        _, history = train_epochs(model, train_sets[label], mixture.config,
                                  mixture.optimizer_states[label],
                                  prng.child(label), epochs=epochs)
        log.debug("class %s trained on %d images, final loss %.4f",
                  label, len(train_sets[label]), history[-1])
        return label, history

    histories = dict(map_ordered(_train, mixture.members, threads))
    mixture.trained = True
    return histories


def _state_check(mixture, caller):
    if len(mixture) == 0 or not mixture.trained:
        raise MovaeStateError(caller, "mixture is empty or untrained")


def distance_matrix(mixture, images, threads=None):
    """
    Distance of every image to its reconstruction by every member.

    Images are scored SCORE_CHUNK rows at a time.

    Args:
        mixture (Mixture): trained mixture
        images (numpy.ndarray): [n x input_dim] images
        threads (int): worker threads, MOVAE_THREADS when None

    Returns:
        numpy.ndarray: [n x |C|], column i belongs to mixture.labels[i]

    Raises:
        MovaeStateError: if the mixture is empty or untrained
        MovaeDimensionError: on an image width mismatch

    Example:
        dist = distance_matrix(mixture, pool_images)
    """
    _state_check(mixture, "distance_matrix")
    images = as_batch(images, mixture.config.input_dim, "distance_matrix")
    if images.shape[0] == 0:
        return np.zeros((0, len(mixture)))
    dtype = mixture.members[0][1].encoder_hidden.weights.dtype
    batch = images.astype(dtype, copy=False)

    def _column(member):
        chunks = []
        for start in range(0, batch.shape[0], SCORE_CHUNK):
            chunk = batch[start:start + SCORE_CHUNK]
            chunks.append(row_distances(chunk, reconstruct(member[1], chunk),
                                        mixture.metric))
        return np.concatenate(chunks)

    return np.stack(map_ordered(_column, mixture.members, threads), axis=1)


def argmin_index(distances):
    """
    Index of the smallest distance, the lowest index on ties.

    Example:
        argmin_index([0.4, 0.1, 0.3])  # -> 1
    """
    return int(np.argmin(np.asarray(distances)))


def predict(mixture, image):
    """
    Classifies one image by its best reconstructing member.

    Args:
        mixture (Mixture): trained mixture
        image (numpy.ndarray): input_dim vector

    Returns:
        Prediction: label and per-class distances

    Raises:
        MovaeStateError: if the mixture is empty or untrained
        MovaeDimensionError: on an image width mismatch

    Example:
        predict(mixture, image).label
    """
    distances = distance_matrix(mixture, image)[0]
    return Prediction(mixture.labels[argmin_index(distances)], distances)


def predict_batch(mixture, images, threads=None):
    """
    Labels of a batch of images, row-wise argmin of distance_matrix.

    Returns:
        list: predicted labels
    """
    dist = distance_matrix(mixture, images, threads)
    labels = mixture.labels
    return [labels[index] for index in np.argmin(dist, axis=1)]


def mixture_evaluate(mixture, dataset, threads=None):
    """
    Accuracy of the mixture on a labelled dataset.

    Args:
        mixture (Mixture): trained mixture
        dataset (LabeledDataset): evaluation data
        threads (int): worker threads, MOVAE_THREADS when None

    Returns:
        float: accuracy in [0, 1]
    """
    return accuracy(predict_batch(mixture, dataset.images, threads),
                    dataset.labels)
