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
This module runs the three experiment protocols: supervised,
semi-supervised one-shot (with generalization iterations) and pure
one-shot episodes.

Every random choice of repeat r comes from Prng(seed).child("repeat-r"),
so a run is fully determined by its configuration.
"""
import logging
import os

import numpy as np

from ..data.augment import augment_pool
from ..data.datasets import LabeledDataset
from ..data.datasets import dataset_per_class_limit
from ..data.datasets import sample_episode
from ..data.datasets import split_labeled_unlabeled
from ..data.idx import load_idx
from ..data.pgm import load_pgm_tree
from ..evaluation.baselines import knn_evaluate
from ..evaluation.baselines import random_guess_accuracy
from ..model.checkpoint import save_checkpoint
from ..model.generalize import run_generalization
from ..model.mixture import build_mixture
from ..model.mixture import mixture_evaluate
from ..model.mixture import mixture_train
from ..movaeexception import MovaeArgumentError
from ..nn.prng import Prng
from ..utils.utils import threads_get
from .config import ONESHOT
from .config import SEMISUP
from .config import SUPERVISED
from .records import MetricsRecord

log = logging.getLogger('movae')


def _protocol_check(config, expected, caller):
    if config.protocol != expected:
        raise MovaeArgumentError(caller, "configuration is for protocol "
                                 "'%s'" % config.protocol)


def _train_sets_build(dataset, config, prng):
    """
    Per-class training images, augmented to pool_size when enabled.
    """
    policy = config.augment_policy()
    train_sets = {}
    for label in dataset.classes:
        images = dataset.class_images(label)
        if config.augment != "none" and config.pool_size > len(images):
            images = augment_pool(images, policy, config.pool_size,
                                  prng.child("augment-%s" % label))
        train_sets[label] = images
    return train_sets


def _mixture_fit(train_sets, config, prng, threads):
    mixture = build_mixture(sorted(train_sets), config.vae_config(),
                            prng.child("init"), metric=config.metric,
                            optimizer=config.optimizer())
    mixture_train(mixture, train_sets, prng.child("train"), threads=threads)
    return mixture


def _checkpoint_save(mixture, config, repeat):
    if config.checkpoint:
        if not os.path.isdir(config.out):
            os.makedirs(config.out)
        save_checkpoint(mixture, os.path.join(config.out,
                                              "mixture-%d.ckpt" % repeat))


def _idx_pair_load(config, record):
    with record.phase("load"):
        train = load_idx(config.train_images, config.train_labels)
        test = load_idx(config.test_images, config.test_labels)
    log.info("loaded %d training and %d test images", len(train), len(test))
    return train, test


def run_supervised(config, train=None, test=None):
    """
    Trains one VAE per class on all its labelled samples and scores the
    test set. No generalization iterations are run.

    Args:
        config (ExperimentConfig): supervised configuration
        train (LabeledDataset): training data, loaded from config when None
        test (LabeledDataset): test data, loaded from config when None

    Returns:
        MetricsRecord

    Raises:
        MovaeArgumentError: if config is not a supervised configuration
        MovaeIOError, MovaeFormatError, MovaeConsistencyError: on bad data

    Example:
        record = run_supervised(config)
    """
    _protocol_check(config, SUPERVISED, "run_supervised")
    record = MetricsRecord(SUPERVISED, config.as_dict())
    if train is None or test is None:
        train, test = _idx_pair_load(config, record)
    threads = threads_get()
    prng = Prng(config.seed)

    for repeat in range(config.repeats):
        repeat_prng = prng.child("repeat-%d" % repeat)
        data = train
        if config.train_per_class is not None:
            data = dataset_per_class_limit(train, config.train_per_class,
                                           repeat_prng.child("subset"))
        train_sets = dict((label, data.class_images(label))
                          for label in data.classes)
        with record.phase("train"):
            mixture = _mixture_fit(train_sets, config, repeat_prng,
                                   threads)
        with record.phase("evaluate"):
            accuracy = mixture_evaluate(mixture, test, threads)
        log.info("repeat %d: accuracy %.4f", repeat, accuracy)
        record.repeat_add(accuracy)
        _checkpoint_save(mixture, config, repeat)
    return record


def run_semisup(config, train=None, test=None):
    """
    One-shot semi-supervised protocol.

    Per repeat: keep `shots` labelled samples per class, optionally
    augment them to pool_size, train the mixture, then run the
    generalization iterations over the remaining unlabelled training
    images, scoring the test set after every iteration.

    Args:
        config (ExperimentConfig): semisup configuration
        train (LabeledDataset): training data, loaded from config when None
        test (LabeledDataset): test data, loaded from config when None

    Returns:
        MetricsRecord: final accuracy and trace per repeat

    Raises:
        MovaeArgumentError: if config is not a semisup configuration
        MovaeIOError, MovaeFormatError, MovaeConsistencyError: on bad data

    Example:
        record = run_semisup(config)
    """
    _protocol_check(config, SEMISUP, "run_semisup")
    record = MetricsRecord(SEMISUP, config.as_dict())
    if train is None or test is None:
        train, test = _idx_pair_load(config, record)
    threads = threads_get()
    prng = Prng(config.seed)
    generalization = config.generalization_config()
    generalization.quota_get(len(train.classes), "run_semisup")

    for repeat in range(config.repeats):
        repeat_prng = prng.child("repeat-%d" % repeat)
        labeled, pool = split_labeled_unlabeled(train, config.shots,
                                                repeat_prng.child("split"))
        train_sets = _train_sets_build(labeled, config, repeat_prng)
        log.info("repeat %d: %d labelled, %d unlabelled", repeat,
                 len(labeled), len(pool))
        with record.phase("initial-train"):
            mixture = _mixture_fit(train_sets, config, repeat_prng, threads)
        with record.phase("generalize"):
            trace = run_generalization(mixture, pool, train_sets,
                                       generalization, test,
                                       repeat_prng.child("generalize"),
                                       threads)
        log.info("repeat %d: accuracy %.4f -> %.4f after %d iterations",
                 repeat, trace[0].accuracy, trace[-1].accuracy,
                 len(trace) - 1)
        record.repeat_add(trace[-1].accuracy, trace=trace)
        _checkpoint_save(mixture, config, repeat)
    return record


def run_oneshot(config, dataset=None):
    """
    Pure one-shot episodic protocol, no unlabelled data.

    Per repeat: sample an N-way k-shot episode, augment every class's
    shots to pool_size, train the mixture and score the episode test
    split. kNN is scored on the very same augmented pools.

    Args:
        config (ExperimentConfig): oneshot configuration
        dataset (LabeledDataset): episode source, loaded from
                                  config.omniglot_dir when None

    Returns:
        MetricsRecord: mixture, kNN and random-guess accuracy per repeat

    Raises:
        MovaeArgumentError: if config is not a oneshot configuration or
                            the dataset is too small for the episode
        MovaeIOError, MovaeFormatError, MovaeConsistencyError: on bad data

    Example:
        record = run_oneshot(config)
    """
    _protocol_check(config, ONESHOT, "run_oneshot")
    record = MetricsRecord(ONESHOT, config.as_dict())
    if dataset is None:
        with record.phase("load"):
            dataset = load_pgm_tree(config.omniglot_dir)
    threads = threads_get()
    prng = Prng(config.seed)
    spec = config.episode_spec()

    for repeat in range(config.repeats):
        repeat_prng = prng.child("repeat-%d" % repeat)
        train, test = sample_episode(dataset, spec,
                                     repeat_prng.child("episode"))
        with record.phase("augment"):
            train_sets = _train_sets_build(train, config, repeat_prng)
        with record.phase("train"):
            mixture = _mixture_fit(train_sets, config, repeat_prng, threads)
        with record.phase("evaluate"):
            accuracy = mixture_evaluate(mixture, test, threads)
        labels = sorted(train_sets)
        pooled = LabeledDataset(
            np.concatenate([train_sets[label] for label in labels]),
            [label for label in labels
             for _ in range(len(train_sets[label]))])
        with record.phase("knn"):
            knn_accuracy = knn_evaluate(pooled, test, config.knn_k)
        log.info("episode %d: mixture %.4f, knn %.4f", repeat, accuracy,
                 knn_accuracy)
        record.repeat_add(accuracy, knn_accuracy=knn_accuracy,
                          random_guess=random_guess_accuracy(spec.n_way))
        _checkpoint_save(mixture, config, repeat)
    return record


protocol_runners = {
    SUPERVISED: run_supervised,
    SEMISUP: run_semisup,
    ONESHOT: run_oneshot,
}
