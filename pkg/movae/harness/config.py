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
This module builds and validates the experiment configuration from a
flat key=value file and command line overrides.
"""
import configparser

from ..data.augment import augment_policy_get
from ..data.datasets import EpisodeSpec
from ..evaluation.metrics import PCC
from ..evaluation.metrics import metric_kind_check
from ..model.generalize import GeneralizationConfig
from ..model.vae import MNIST_FAMILY
from ..model.vae import OMNIGLOT_FAMILY
from ..model.vae import VaeConfig
from ..movaeexception import MovaeArgumentError
from ..movaeexception import MovaeIOError

SUPERVISED = "supervised"
SEMISUP = "semisup"
ONESHOT = "oneshot"
PROTOCOLS = (SUPERVISED, SEMISUP, ONESHOT)

_SECTION = "experiment"

_families = {"mnist": MNIST_FAMILY, "omniglot": OMNIGLOT_FAMILY}


def _boolean(value):
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError("not a boolean: %r" % (value,))


def _optional_int(value):
    if value is None or str(value).strip().lower() in ("all", "none", ""):
        return None
    return int(value)


# key -> converter
_schema = {
    "protocol": str,
    "train_images": str,
    "train_labels": str,
    "test_images": str,
    "test_labels": str,
    "omniglot_dir": str,
    "shots": int,
    "ways": int,
    "test_per_class": _optional_int,
    "psi": int,
    "iterations": _optional_int,
    "retrain_epochs": _optional_int,
    "cold_restart": _boolean,
    "augment": str,
    "pool_size": int,
    "metric": str,
    "seed": int,
    "repeats": int,
    "family": str,
    "epochs": _optional_int,
    "hidden_dim": _optional_int,
    "latent_dim": _optional_int,
    "batch_size": _optional_int,
    "learning_rate": float,
    "train_per_class": _optional_int,
    "knn_k": int,
    "checkpoint": _boolean,
    "out": str,
}

# protocol -> defaults, applied below file and command line values
_protocol_defaults = {
    SUPERVISED: {"family": "mnist", "augment": "none", "shots": 1,
                 "ways": 2, "pool_size": 1},
    SEMISUP: {"family": "mnist", "augment": "none", "shots": 1, "ways": 2,
              "pool_size": 500},
    ONESHOT: {"family": "omniglot", "augment": "omniglot", "shots": 1,
              "ways": 5, "pool_size": 10000},
}

_common_defaults = {
    "psi": 3000,
    "iterations": None,
    "retrain_epochs": None,
    "cold_restart": False,
    "metric": PCC,
    "repeats": 1,
    "epochs": None,
    "hidden_dim": None,
    "latent_dim": None,
    "batch_size": None,
    "learning_rate": 0.001,
    "train_per_class": None,
    "test_per_class": None,
    "knn_k": 3,
    "checkpoint": False,
    "out": "movae-out",
    "seed": None,
    "train_images": None,
    "train_labels": None,
    "test_images": None,
    "test_labels": None,
    "omniglot_dir": None,
}

_required_paths = {
    SUPERVISED: ("train_images", "train_labels", "test_images",
                 "test_labels"),
    SEMISUP: ("train_images", "train_labels", "test_images",
              "test_labels"),
    ONESHOT: ("omniglot_dir",),
}


def config_file_read(path):
    """
    Reads a flat key=value experiment file.

    Lines starting with '#' are comments. Keys are the long option names
    with '-' replaced by '_'.

    Args:
        path (string): config file

    Returns:
        dict: key -> raw string value

    Raises:
        MovaeIOError: if the file cannot be read
        MovaeArgumentError: on a malformed line or an unknown key

    Example:
        values = config_file_read("mnist-1shot.cfg")
    """
    try:
        with open(path) as handle:
            text = handle.read()
    except (IOError, OSError) as error:
        raise MovaeIOError("config_file_read", "cannot read '%s': %s" %
                           (path, error))
    parser = configparser.RawConfigParser()
    try:
        parser.read_string("[%s]\n%s" % (_SECTION, text), source=path)
    except configparser.Error as error:
        raise MovaeArgumentError("config_file_read", "'%s' is malformed: "
                                 "%s" % (path, error))
    values = {}
    for key, value in parser.items(_SECTION):
        key = key.replace("-", "_")
        if key not in _schema:
            raise MovaeArgumentError("config_file_read", "unknown key '%s' "
                                     "in '%s'" % (key, path))
        values[key] = value
    return values


class ExperimentConfig(object):
    """
    Validated settings of one experiment.

    Build it with experiment_config_create. Attributes carry the keys of
    the config schema.
    """

    def __init__(self, **values):
        for key, value in values.items():
            setattr(self, key, value)

    def as_dict(self):
        return dict((key, getattr(self, key)) for key in sorted(_schema))

    def vae_config(self):
        """VaeConfig of the architecture family plus explicit overrides."""
        settings = dict(_families[self.family])
        for key in ("hidden_dim", "latent_dim", "epochs"):
            if getattr(self, key) is not None:
                settings[key] = getattr(self, key)
        return VaeConfig(input_dim=784, batch_size=self.batch_size,
                         **settings)

    def optimizer(self):
        return {"learning_rate": self.learning_rate}

    def generalization_config(self):
        return GeneralizationConfig(psi=self.psi,
                                    max_iterations=self.iterations,
                                    retrain_epochs=self.retrain_epochs,
                                    cold_restart=self.cold_restart)

    def episode_spec(self):
        return EpisodeSpec(self.ways, self.shots, self.test_per_class)

    def augment_policy(self):
        return augment_policy_get(self.augment)


def experiment_config_create(file_values=None, overrides=None,
                             protocol=None):
    """
    creates a validated ExperimentConfig

    Precedence, lowest first: protocol defaults, file values,
    overrides. Every value is converted and validated here, before any
    computation starts.

    Args:
        file_values (dict): values from config_file_read
        overrides (dict): command line values, None entries are ignored
        protocol (string): forces the protocol, e.g. from a subcommand

    Returns:
        ExperimentConfig

    Raises:
        MovaeArgumentError: on a missing or invalid value

    Example:
        config = experiment_config_create(
            config_file_read("run.cfg"), {"seed": 3}, protocol="semisup")
    """
    merged = {}
    merged.update(file_values or {})
    merged.update(dict((key, value) for key, value in
                       (overrides or {}).items() if value is not None))
    if protocol is not None:
        merged["protocol"] = protocol
    if merged.get("protocol") not in PROTOCOLS:
        raise MovaeArgumentError(
            "experiment_config_create", "protocol must be one of %s, got "
            "%r" % (", ".join(PROTOCOLS), merged.get("protocol")))
    protocol = merged["protocol"]

    values = dict(_common_defaults)
    values.update(_protocol_defaults[protocol])
    for key, raw in merged.items():
        if key not in _schema:
            raise MovaeArgumentError("experiment_config_create",
                                     "unknown key '%s'" % key)
        try:
            values[key] = _schema[key](raw) if raw is not None else None
        except (TypeError, ValueError):
            raise MovaeArgumentError(
                "experiment_config_create", "invalid value %r for '%s'" %
                (raw, key))

    _validate(values)
    return ExperimentConfig(**values)


def _validate(values):
    caller = "experiment_config_create"

    def _check(condition, message):
        if not condition:
            raise MovaeArgumentError(caller, message)

    _check(values["seed"] is not None, "seed is mandatory")
    _check(0 <= values["seed"] < 2 ** 64, "seed must be in [0, 2**64)")
    for key in _required_paths[values["protocol"]]:
        _check(values[key], "'%s' is required by the %s protocol" %
               (key, values["protocol"]))
    metric_kind_check(values["metric"], caller)
    augment_policy_get(values["augment"])
    _check(values["family"] in _families, "family must be one of %s" %
           ", ".join(sorted(_families)))
    _check(values["repeats"] >= 1, "repeats must be >= 1")
    _check(values["shots"] >= 1, "shots must be >= 1")
    _check(values["ways"] >= 2, "ways must be >= 2")
    _check(values["psi"] >= 1, "psi must be >= 1")
    _check(values["pool_size"] >= values["shots"],
           "pool_size must be >= shots")
    _check(values["knn_k"] >= 1, "knn_k must be >= 1")
    _check(values["learning_rate"] > 0, "learning_rate must be > 0")
    _check(values["iterations"] is None or values["iterations"] >= 0,
           "iterations must be >= 0")
    for key in ("epochs", "hidden_dim", "latent_dim", "batch_size",
                "retrain_epochs", "train_per_class", "test_per_class"):
        _check(values[key] is None or values[key] >= 1,
               "%s must be >= 1" % key)
