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
This module is the movae command line.

    movae supervised --train-images ... --seed 1
    movae semisup --config mnist-1shot.cfg --seed 7 --out runs/7
    movae oneshot --omniglot-dir omniglot_28 --ways 5 --seed 3
    movae run --config experiment.cfg
    movae convert --omniglot-dir omniglot_105 --dest omniglot_28

The exit code is 0 on success and the exit_code of the error category
otherwise, 1 for an unexpected failure.
"""
import argparse
import json
import logging
import os
import sys

from .. import __version__
from ..data.pgm import pgm_tree_convert
from ..evaluation.metrics import METRIC_KINDS
from ..movaeexception import MovaeArgumentError
from ..movaeexception import MovaeIOError
from ..movaeexception import MovaeOperationError
from .config import PROTOCOLS
from .config import config_file_read
from .config import experiment_config_create
from .protocols import protocol_runners
from .records import metrics_record_write

log = logging.getLogger('movae')

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
LOG_FILE = "movae.log"

# dest -> (flag, argparse keyword arguments)
_experiment_flags = (
    ("config", "--config", {"help": "key=value experiment file"}),
    ("train_images", "--train-images", {}),
    ("train_labels", "--train-labels", {}),
    ("test_images", "--test-images", {}),
    ("test_labels", "--test-labels", {}),
    ("omniglot_dir", "--omniglot-dir", {}),
    ("shots", "--shots", {"type": int}),
    ("ways", "--ways", {"type": int}),
    ("test_per_class", "--test-per-class", {"type": int}),
    ("psi", "--psi", {"type": int,
                      "help": "samples consumed per iteration over all "
                              "classes, each class claims psi // |C|"}),
    ("iterations", "--iterations", {"help": "iteration cap or 'all'"}),
    ("retrain_epochs", "--retrain-epochs", {"type": int}),
    ("augment", "--augment", {}),
    ("pool_size", "--pool-size", {"type": int}),
    ("metric", "--metric", {"choices": METRIC_KINDS}),
    ("seed", "--seed", {"type": int}),
    ("repeats", "--repeats", {"type": int}),
    ("family", "--family", {}),
    ("epochs", "--epochs", {"type": int}),
    ("hidden_dim", "--hidden-dim", {"type": int}),
    ("latent_dim", "--latent-dim", {"type": int}),
    ("batch_size", "--batch-size", {"type": int}),
    ("learning_rate", "--learning-rate", {"type": float}),
    ("train_per_class", "--train-per-class", {"type": int}),
    ("knn_k", "--knn-k", {"type": int}),
    ("out", "--out", {"help": "output directory"}),
)


class _ArgumentParser(argparse.ArgumentParser):
    """argparse parser raising MovaeArgumentError instead of exiting."""

    def error(self, message):
        raise MovaeArgumentError("movae", message)


def _experiment_arguments(parser, with_protocol=False):
    for dest, flag, kwargs in _experiment_flags:
        parser.add_argument(flag, dest=dest, **kwargs)
    parser.add_argument("--cold-restart", dest="cold_restart",
                        action="store_const", const=True)
    parser.add_argument("--checkpoint", dest="checkpoint",
                        action="store_const", const=True,
                        help="save <out>/mixture-<repeat>.ckpt")
    if with_protocol:
        parser.add_argument("--protocol", dest="protocol",
                            choices=PROTOCOLS)


def parser_create():
    """
    creates the argparse parser of the movae command

    Returns:
        argparse.ArgumentParser
    """
    parser = _ArgumentParser(
        prog="movae", description="Mixture of VAEs one-shot classifier "
        "experiments")
    parser.add_argument("--version", action="version",
                        version="%(prog)s " + __version__)
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log at DEBUG level")
    commands = parser.add_subparsers(dest="command",
                                     parser_class=_ArgumentParser)
    for protocol in PROTOCOLS:
        _experiment_arguments(commands.add_parser(
            protocol, help="run the %s protocol" % protocol))
    _experiment_arguments(commands.add_parser(
        "run", help="run the protocol named by --protocol or the config"),
        with_protocol=True)
    convert = commands.add_parser(
        "convert", help="validate a PGM class tree, optionally write a "
        "28x28 copy")
    convert.add_argument("--omniglot-dir", dest="omniglot_dir",
                         required=True)
    convert.add_argument("--dest", dest="dest")
    return parser


def _handlers_install(verbose, out_dir=None):
    formatter = logging.Formatter(LOG_FORMAT)
    handlers = [logging.StreamHandler(sys.stderr)]
    if out_dir is not None:
        try:
            if not os.path.isdir(out_dir):
                os.makedirs(out_dir)
            handlers.append(logging.FileHandler(os.path.join(out_dir,
                                                             LOG_FILE)))
        except (IOError, OSError) as error:
            raise MovaeIOError("movae", "cannot write to '%s': %s" %
                               (out_dir, error))
    for handler in handlers:
        handler.setFormatter(formatter)
        log.addHandler(handler)
    log.setLevel(logging.DEBUG if verbose else logging.INFO)
    return handlers


def _handlers_remove(handlers):
    for handler in handlers:
        log.removeHandler(handler)
        handler.close()


def _experiment_config(args):
    file_values = config_file_read(args.config) if args.config else {}
    overrides = dict((dest, getattr(args, dest))
                     for dest, _, _ in _experiment_flags if dest != "config")
    overrides["cold_restart"] = args.cold_restart
    overrides["checkpoint"] = args.checkpoint
    protocol = None
    if args.command in PROTOCOLS:
        protocol = args.command
    elif args.protocol is not None:
        overrides["protocol"] = args.protocol
    return experiment_config_create(file_values, overrides, protocol)


def experiment_run(config):
    """
    Runs a validated experiment and writes its outputs.

    Args:
        config (ExperimentConfig)

    Returns:
        MetricsRecord

    Raises:
        MovaeOperationError: any error of the protocol run

    Example:
        experiment_run(experiment_config_create(values, protocol="oneshot"))
    """
    log.info("%s run, seed %d, output %s", config.protocol, config.seed,
             config.out)
    record = protocol_runners[config.protocol](config)
    summary = metrics_record_write(record, config.out)
    aggregate = record.aggregate()["accuracy"]
    log.info("accuracy %.4f +- %.4f over %d repeats, summary %s",
             aggregate["mean"], aggregate["std"], len(record.repeats),
             summary)
    return record


def main(argv=None):
    """
    Entry point of the movae command.

    Args:
        argv (list): arguments without the program name, sys.argv when
                     None

    Returns:
        int: exit code
    """
    handlers = []
    try:
        parser = parser_create()
        args = parser.parse_args(argv)
        if args.command is None:
            raise MovaeArgumentError("movae", "a subcommand is required")
        if args.command == "convert":
            handlers = _handlers_install(args.verbose)
            counts = pgm_tree_convert(args.omniglot_dir, args.dest)
            log.info("%d classes, %d images in %s", counts["classes"],
                     counts["images"], args.omniglot_dir)
            sys.stdout.write(json.dumps(counts, sort_keys=True) + "\n")
            return 0
        config = _experiment_config(args)
        handlers = _handlers_install(args.verbose, config.out)
        experiment_run(config)
        return 0
    except MovaeOperationError as error:
        if not handlers:
            handlers = _handlers_install(False)
        log.error("%s", error)
        return error.exit_code
    except Exception:
        if not handlers:
            handlers = _handlers_install(False)
        log.exception("unexpected failure")
        return 1
    finally:
        _handlers_remove(handlers)


if __name__ == "__main__":
    sys.exit(main())
