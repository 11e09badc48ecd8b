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
This module collects experiment results and writes them out: a JSON
summary, one CSV trace per repeat and a separate timings file.

Summary schema:
    {"format": "movae-metrics/1",
     "protocol": str,
     "config": {key: value},
     "repeats": [{"repeat": int, "accuracy": float,
                  "knn_accuracy": float or null,
                  "random_guess": float or null,
                  "trace": [{"iteration": int, "pool_size": int,
                             "accuracy": float, "selected": int,
                             "skipped": int}]}],
     "aggregate": {"accuracy": {"mean": float, "std": float},
                   "knn_accuracy": {"mean": float, "std": float} or null,
                   "trace": [{"iteration": int, "mean": float,
                              "std": float, "repeats": int}]}}

Timings are kept out of the summary so that reruns with one seed give
byte-identical summaries.
"""
import contextlib
import csv
import json
import os
import time

import numpy as np

from ..movaeexception import MovaeConsistencyError
from ..movaeexception import MovaeIOError

RECORD_FORMAT = "movae-metrics/1"
TRACE_COLUMNS = ("iteration", "pool_size", "accuracy")

_repeat_keys = ("repeat", "accuracy", "knn_accuracy", "random_guess",
                "trace")
_trace_keys = ("iteration", "pool_size", "accuracy", "selected", "skipped")


def _mean_std(values):
    values = np.asarray(values, dtype=np.float64)
    return {"mean": float(values.mean()), "std": float(values.std())}


class MetricsRecord(object):
    """
    Per-repeat results of one experiment and their aggregates.

    Args:
        protocol (string): experiment protocol
        config (dict): echo of the experiment configuration

    Example:
        record = MetricsRecord("semisup", config.as_dict())
        with record.phase("train"):
            ...
        record.repeat_add(0.91, trace=trace)
    """

    def __init__(self, protocol, config):
        self.protocol = protocol
        self.config = dict(config)
        self.repeats = []
        self.timings = {}

    def repeat_add(self, accuracy, trace=None, knn_accuracy=None,
                   random_guess=None):
        points = []
        for point in trace or []:
            points.append({"iteration": int(point.iteration),
                           "pool_size": int(point.pool_size),
                           "accuracy": float(point.accuracy),
                           "selected": int(point.selected),
                           "skipped": int(point.skipped)})
        entry = {
            "repeat": len(self.repeats),
            "accuracy": float(accuracy),
            "knn_accuracy": (None if knn_accuracy is None
                             else float(knn_accuracy)),
            "random_guess": (None if random_guess is None
                             else float(random_guess)),
            "trace": points,
        }
        self.repeats.append(entry)
        return entry

    @contextlib.contextmanager
    def phase(self, name):
        """Adds the wall-clock seconds of the block to timings[name]."""
        start = time.time()
        try:
            yield
        finally:
            self.timings.setdefault(name, []).append(time.time() - start)

    def aggregate(self):
        """
        Mean and population stddev over repeats, per iteration for traces.

        Returns:
            dict: see the module docstring
        """
        if not self.repeats:
            raise MovaeConsistencyError("MetricsRecord.aggregate",
                                        "no repeats recorded")
        result = {"accuracy": _mean_std([r["accuracy"]
                                         for r in self.repeats]),
                  "knn_accuracy": None,
                  "trace": []}
        knn = [r["knn_accuracy"] for r in self.repeats
               if r["knn_accuracy"] is not None]
        if knn:
            result["knn_accuracy"] = _mean_std(knn)
        by_iteration = {}
        for repeat in self.repeats:
            for point in repeat["trace"]:
                by_iteration.setdefault(point["iteration"], []).append(
                    point["accuracy"])
        for iteration in sorted(by_iteration):
            values = by_iteration[iteration]
            summary = _mean_std(values)
            summary.update({"iteration": iteration,
                            "repeats": len(values)})
            result["trace"].append(summary)
        return result

    def as_dict(self):
        return {"format": RECORD_FORMAT,
                "protocol": self.protocol,
                "config": self.config,
                "repeats": self.repeats,
                "aggregate": self.aggregate()}

    def to_json(self):
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)


def metrics_record_validate(data):
    """
    Checks a summary dict against the documented schema.

    Args:
        data (dict): parsed summary JSON

    Returns:
        None

    Raises:
        MovaeConsistencyError: on a missing key, a wrong type, or
                               aggregates that disagree with the repeats
    """
    caller = "metrics_record_validate"

    def _check(condition, message):
        if not condition:
            raise MovaeConsistencyError(caller, message)

    _check(data.get("format") == RECORD_FORMAT, "unknown format")
    for key in ("protocol", "config", "repeats", "aggregate"):
        _check(key in data, "missing key '%s'" % key)
    _check(len(data["repeats"]) >= 1, "no repeats")
    for repeat in data["repeats"]:
        _check(set(repeat) == set(_repeat_keys),
               "repeat keys %s" % sorted(repeat))
        _check(0 <= repeat["accuracy"] <= 1, "accuracy out of range")
        for point in repeat["trace"]:
            _check(set(point) == set(_trace_keys),
                   "trace keys %s" % sorted(point))
    expected = _mean_std([r["accuracy"] for r in data["repeats"]])
    actual = data["aggregate"]["accuracy"]
    _check(abs(expected["mean"] - actual["mean"]) < 1e-12 and
           abs(expected["std"] - actual["std"]) < 1e-12,
           "aggregate accuracy does not match the repeats")


def metrics_record_write(record, out_dir):
    """
    Writes summary.json, trace-<repeat>.csv and timings.json.

    Args:
        record (MetricsRecord)
        out_dir (string): output directory, created when missing

    Returns:
        string: path of summary.json

    Raises:
        MovaeIOError: if the directory or a file cannot be written
    """
    try:
        if not os.path.isdir(out_dir):
            os.makedirs(out_dir)
        summary = os.path.join(out_dir, "summary.json")
        with open(summary, "w") as handle:
            handle.write(record.to_json())
            handle.write("\n")
        for repeat in record.repeats:
            if not repeat["trace"]:
                continue
            path = os.path.join(out_dir, "trace-%d.csv" % repeat["repeat"])
            with open(path, "w") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(TRACE_COLUMNS)
                for point in repeat["trace"]:
                    writer.writerow([point[key] for key in TRACE_COLUMNS])
        with open(os.path.join(out_dir, "timings.json"), "w") as handle:
            json.dump(record.timings, handle, sort_keys=True, indent=2)
    except (IOError, OSError) as error:
        raise MovaeIOError("metrics_record_write", "cannot write to '%s': "
                           "%s" % (out_dir, error))
    return summary
