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
This module holds the in-memory datasets and performs the labelled /
unlabelled splits and the N-way k-shot episode sampling.
"""
import numpy as np

from ..movaeexception import MovaeArgumentError
from ..movaeexception import MovaeConsistencyError
from ..movaeexception import MovaeDimensionError
from ..movaeexception import MovaeDomainError
from ..utils.utils import positive_int_check


def _label_normalise(label):
    if isinstance(label, np.integer):
        return int(label)
    if isinstance(label, np.str_):
        return str(label)
    return label


class LabeledDataset(object):
    """
    Flattened images with a parallel list of class labels.

    Args:
        images (numpy.ndarray): [n x d] pixels in [0, 1]
        labels (list): n class labels

    Raises:
        MovaeDimensionError: if images is not a 2-d batch
        MovaeConsistencyError: if images and labels differ in length
        MovaeDomainError: if a pixel lies outside [0, 1]

    Example:
        dataset = LabeledDataset(images, [0, 1, 1])
        dataset.class_index[1]  # -> [1, 2]
    """

    def __init__(self, images, labels):
        images = np.asarray(images, dtype=np.float32)
        if images.ndim != 2:
            raise MovaeDimensionError(
                "LabeledDataset", "images must be a 2-d batch, got shape %s"
                % (tuple(images.shape),))
        labels = [_label_normalise(label) for label in labels]
        if images.shape[0] != len(labels):
            raise MovaeConsistencyError(
                "LabeledDataset", "%d images for %d labels" %
                (images.shape[0], len(labels)))
        if images.size and (images.min() < 0 or images.max() > 1):
            raise MovaeDomainError("LabeledDataset",
                                   "pixels must lie in [0, 1]")
        self.images = images
        self.labels = labels
        self.class_index = {}
        for index, label in enumerate(labels):
            self.class_index.setdefault(label, []).append(index)

    @property
    def classes(self):
        """Distinct labels in ascending order."""
        return sorted(self.class_index)

    def class_images(self, label):
        return self.images[self.class_index[label]]

    def subset(self, indices):
        indices = list(indices)
        return LabeledDataset(self.images[indices],
                              [self.labels[i] for i in indices])

    def __len__(self):
        return len(self.labels)


class UnlabeledPool(object):
    """
    Unlabelled images with a consumed flag per image.

    Consumed images are never scored or selected again.

    Args:
        images (numpy.ndarray): [n x d] pixels
    """

    def __init__(self, images):
        self.images = np.asarray(images, dtype=np.float32)
        self.consumed = np.zeros(self.images.shape[0], dtype=bool)

    def remaining_indices(self):
        """Pool indices of the unconsumed images, ascending."""
        return np.flatnonzero(~self.consumed)

    def consume(self, indices):
        """
        Marks pool indices as consumed.

        Raises:
            MovaeConsistencyError: if an index was already consumed
        """
        indices = np.asarray(list(indices), dtype=np.int64)
        if indices.size and np.any(self.consumed[indices]):
            raise MovaeConsistencyError(
                "UnlabeledPool.consume", "pool sample consumed twice")
        self.consumed[indices] = True

    def __len__(self):
        return int((~self.consumed).sum())


class EpisodeSpec(object):
    """
    Shape of an N-way k-shot episode.

    Args:
        n_way (int): classes per episode, >= 2
        k_shot (int): training samples per class, >= 1
        test_per_class (int): test samples per class, 20 - k_shot when
                              None, i.e. 19 for 1-shot and 15 for 5-shot

    Raises:
        MovaeArgumentError: on an invalid count
    """

    def __init__(self, n_way, k_shot=1, test_per_class=None):
        positive_int_check(n_way, "n_way", "EpisodeSpec", minimum=2)
        positive_int_check(k_shot, "k_shot", "EpisodeSpec")
        if test_per_class is None:
            test_per_class = max(20 - k_shot, 1)
        positive_int_check(test_per_class, "test_per_class", "EpisodeSpec")
        self.n_way = int(n_way)
        self.k_shot = int(k_shot)
        self.test_per_class = int(test_per_class)


def split_labeled_unlabeled(dataset, k_per_class, prng):
    """
    Draws k labelled samples per class, the rest become unlabelled.

    Args:
        dataset (LabeledDataset): full training set
        k_per_class (int): labelled samples per class
        prng (Prng): random stream

    Returns:
        (LabeledDataset, UnlabeledPool)

    Raises:
        MovaeArgumentError: if a class has fewer than k_per_class samples

    Example:
        labeled, pool = split_labeled_unlabeled(mnist, 1, Prng(5))
    """
    positive_int_check(k_per_class, "k_per_class", "split_labeled_unlabeled")
    chosen = []
    for label in dataset.classes:
        indices = dataset.class_index[label]
        if len(indices) < k_per_class:
            raise MovaeArgumentError(
                "split_labeled_unlabeled", "class '%s' has %d samples, "
                "%d requested" % (label, len(indices), k_per_class))
        picks = prng.choice(len(indices), k_per_class, replace=False)
        chosen.extend(indices[pick] for pick in picks)
    mask = np.zeros(len(dataset), dtype=bool)
    mask[chosen] = True
    return dataset.subset(chosen), UnlabeledPool(dataset.images[~mask])


def dataset_per_class_limit(dataset, per_class, prng):
    """
    Keeps at most per_class randomly chosen samples of every class.

    Args:
        dataset (LabeledDataset)
        per_class (int): cap per class
        prng (Prng): random stream

    Returns:
        LabeledDataset: samples in their original order
    """
    positive_int_check(per_class, "per_class", "dataset_per_class_limit")
    keep = []
    for label in dataset.classes:
        indices = dataset.class_index[label]
        order = prng.permutation(len(indices))[:per_class]
        keep.extend(indices[pick] for pick in order)
    return dataset.subset(sorted(keep))


def sample_episode(dataset, spec, prng):
    """
    Samples an N-way k-shot train/test episode.

    Classes are drawn without replacement. Per class, k_shot train and
    test_per_class test samples are drawn without overlap.

    Args:
        dataset (LabeledDataset): source data
        spec (EpisodeSpec): episode shape
        prng (Prng): random stream

    Returns:
        (LabeledDataset, LabeledDataset): train and test splits

    Raises:
        MovaeArgumentError: if classes or per-class samples are too few

    Example:
        train, test = sample_episode(omniglot, EpisodeSpec(5, 1), prng)
    """
    classes = dataset.classes
    if len(classes) < spec.n_way:
        raise MovaeArgumentError(
            "sample_episode", "%d-way episode from %d classes" %
            (spec.n_way, len(classes)))
    needed = spec.k_shot + spec.test_per_class
    picked = sorted(classes[i] for i in
                    prng.choice(len(classes), spec.n_way, replace=False))
    train, test = [], []
    for label in picked:
        indices = dataset.class_index[label]
        if len(indices) < needed:
            raise MovaeArgumentError(
                "sample_episode", "class '%s' has %d samples, %d needed" %
                (label, len(indices), needed))
        order = prng.permutation(len(indices))
        train.extend(indices[i] for i in order[:spec.k_shot])
        test.extend(indices[i] for i in order[spec.k_shot:needed])
    return dataset.subset(train), dataset.subset(test)
