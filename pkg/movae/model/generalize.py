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
This module performs the generalization iterations: score the
unconsumed unlabelled pool with every member, let every class claim its
best and exclusive samples, grow the per-class training sets and
retrain.
"""
import logging
from collections import namedtuple

import numpy as np

from ..movaeexception import MovaeArgumentError
from ..utils.utils import positive_int_check
from .mixture import distance_matrix
from .mixture import member_reset
from .mixture import mixture_evaluate
from .mixture import mixture_train

log = logging.getLogger('movae')

TraceEntry = namedtuple("TraceEntry", ["iteration", "pool_size", "accuracy",
                                       "selected", "skipped"])


class GeneralizationConfig(object):
    """
    Settings of the generalization phase.

    Args:
        psi (int): samples consumed per iteration, >= number of classes
        max_iterations (int): iteration cap, None runs until the pool is
                              exhausted
        retrain_epochs (int): epochs per retraining, VaeConfig.epochs
                              when None
        cold_restart (bool): reinitialise members before retraining
                             instead of continuing from their weights

    Raises:
        MovaeArgumentError: on an invalid value

    Example:
        config = GeneralizationConfig(psi=3000, max_iterations=5)
    """

    def __init__(self, psi=3000, max_iterations=None, retrain_epochs=None,
                 cold_restart=False):
        positive_int_check(psi, "psi", "GeneralizationConfig")
        if max_iterations is not None:
            positive_int_check(max_iterations, "max_iterations",
                               "GeneralizationConfig", minimum=0)
        if retrain_epochs is not None:
            positive_int_check(retrain_epochs, "retrain_epochs",
                               "GeneralizationConfig")
        self.psi = int(psi)
        self.max_iterations = max_iterations
        self.retrain_epochs = retrain_epochs
        self.cold_restart = bool(cold_restart)

    def quota_get(self, n_classes, caller="quota_get"):
        """Samples per class per iteration, floor(psi / n_classes)."""
        if self.psi < n_classes:
            raise MovaeArgumentError(
                caller, "psi %d is smaller than the %d classes" %
                (self.psi, n_classes))
        return self.psi // n_classes


class SelectionReport(object):
    """
    Outcome of one selection round.

    Attributes:
        selected (dict): class position -> selected row indices, in
                         acceptance order
        skipped (dict): class position -> candidates rejected by the
                        exclusion rule
    """

    def __init__(self, n_classes):
        self.selected = dict((i, []) for i in range(n_classes))
        self.skipped = dict((i, 0) for i in range(n_classes))

    @property
    def total_selected(self):
        return sum(len(rows) for rows in self.selected.values())

    @property
    def total_skipped(self):
        return sum(self.skipped.values())


def select_samples(dist, psi, class_order=None):
    """
    Lets every class claim its best reconstructed, exclusive samples.

    For each class in class_order, the candidates are walked by
    ascending distance. A candidate is accepted unless another class
    claimed it earlier in this round, or it is among the psi best
    candidates of any other class. A class stops after floor(psi / |C|)
    acceptances or when its candidates run out. Ties in distance keep
    the lower row index first.

    Args:
        dist (numpy.ndarray): [n x |C|] distances of unconsumed samples
        psi (int): samples consumed per iteration
        class_order (list): class positions in processing order,
                            ascending when None

    Returns:
        SelectionReport

    Raises:
        MovaeArgumentError: if psi < |C|

    Example:
        report = select_samples(dist, psi=3000)
        report.selected[0]  # rows claimed by the first class
    """
    dist = np.asarray(dist, dtype=np.float64)
    n_samples, n_classes = dist.shape
    if class_order is None:
        class_order = range(n_classes)
    quota = GeneralizationConfig(psi).quota_get(n_classes, "select_samples")
    report = SelectionReport(n_classes)
    if n_samples == 0:
        return report

    ranked = np.argsort(dist, axis=0, kind="stable")
    top = ranked[:psi]
    # in_top[j, k]: row k is among the psi best of class j
    in_top = np.zeros((n_classes, n_samples), dtype=bool)
    for j in range(n_classes):
        in_top[j, top[:, j]] = True
    top_count = in_top.sum(axis=0)

    claimed = np.zeros(n_samples, dtype=bool)
    for i in class_order:
        accepted = report.selected[i]
        for row in ranked[:, i]:
            if len(accepted) >= quota:
                break
            if claimed[row]:
                continue
            if top_count[row] - in_top[i, row] > 0:
                report.skipped[i] += 1
                continue
            claimed[row] = True
            accepted.append(int(row))
    return report


def generalization_iteration(mixture, pool, train_sets, config, prng,
                             threads=None):
    """
    Runs one generalization iteration.

    The distance matrix of the unconsumed pool is computed once, the
    samples chosen by select_samples join their class training sets and
    are consumed, then every member is retrained on its accumulated set.
    When nothing is selected the members are left untouched.

    Args:
        mixture (Mixture): trained mixture, updated in place
        pool (UnlabeledPool): updated in place
        train_sets (dict): label -> images, updated in place
        config (GeneralizationConfig)
        prng (Prng): random stream of this iteration
        threads (int): worker threads, MOVAE_THREADS when None

    Returns:
        (Mixture, UnlabeledPool, dict, SelectionReport): the report rows
        are pool indices

    Raises:
        MovaeStateError: if the mixture is untrained
        MovaeNumericalError: propagated from training

    Example:
        generalization_iteration(mixture, pool, train_sets, config, prng)
    """
    remaining = pool.remaining_indices()
    dist = distance_matrix(mixture, pool.images[remaining], threads)
    local = select_samples(dist, config.psi)

    report = SelectionReport(len(mixture))
    report.skipped = local.skipped
    for position, label in enumerate(mixture.labels):
        rows = remaining[local.selected[position]]
        report.selected[position] = [int(row) for row in rows]
        if len(rows):
            train_sets[label] = np.concatenate(
                [train_sets[label], pool.images[rows]])
        pool.consume(rows)

    if report.total_selected == 0:
        log.info("no sample passed the exclusion rule, members kept")
        return mixture, pool, train_sets, report
    if config.cold_restart:
        for label in mixture.labels:
            member_reset(mixture, label, prng.child("restart-%s" % label))
    mixture_train(mixture, train_sets, prng, epochs=config.retrain_epochs,
                  threads=threads)
    return mixture, pool, train_sets, report


def run_generalization(mixture, pool, train_sets, config, eval_set, prng,
                       threads=None):
    """
    Iterates generalization_iteration and scores every iteration.

    Iteration 0 scores the mixture before any generalization. The loop
    stops at config.max_iterations, when the pool is exhausted, or when
    an iteration selects nothing; such an iteration adds no entry, so
    pool sizes strictly decrease along the trace.

    Args:
        mixture (Mixture): trained mixture, updated in place
        pool (UnlabeledPool): updated in place
        train_sets (dict): label -> images, updated in place
        config (GeneralizationConfig)
        eval_set (LabeledDataset): evaluation data
        prng (Prng): parent random stream
        threads (int): worker threads, MOVAE_THREADS when None

    Returns:
        list of TraceEntry

    Example:
        trace = run_generalization(mixture, pool, train_sets, config,
                                   test_set, prng)
    """
    trace = [TraceEntry(0, len(pool),
                        mixture_evaluate(mixture, eval_set, threads), 0, 0)]
    log.info("iteration 0: pool %d, accuracy %.4f", trace[0].pool_size,
             trace[0].accuracy)
    iteration = 0
    while len(pool) > 0 and (config.max_iterations is None or
                             iteration < config.max_iterations):
        iteration += 1
        _, _, _, report = generalization_iteration(
            mixture, pool, train_sets, config,
            prng.child("iteration-%d" % iteration), threads)
        if report.total_selected == 0:
            log.info("iteration %d selected nothing, stopping", iteration)
            break
        entry = TraceEntry(iteration, len(pool),
                           mixture_evaluate(mixture, eval_set, threads),
                           report.total_selected, report.total_skipped)
        trace.append(entry)
        log.info("iteration %d: selected %d, skipped %d, pool %d, "
                 "accuracy %.4f", iteration, entry.selected, entry.skipped,
                 entry.pool_size, entry.accuracy)
    return trace
