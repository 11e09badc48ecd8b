import json
import logging
import os

import numpy as np
from mock import patch

from movae.data.idx import idx_write
from movae.data.pgm import pgm_write
from movae.harness.cli import main
from movae.harness.cli import parser_create
from movae.harness.records import MetricsRecord
from movae.harness.records import metrics_record_validate
from movae.movaeexception import MovaeNumericalError
from movae.nn.prng import Prng


def _idx_args(tmp_path):
    prng = Prng(1)
    args = []
    for split in ("train", "test"):
        images = np.zeros((6, 28, 28), dtype=np.uint8)
        images[:3, :14, :] = 230
        images[3:, 14:, :] = 230
        images += (prng.random(images.shape) * 20).astype(np.uint8)
        images_path = str(tmp_path / (split + "-images"))
        labels_path = str(tmp_path / (split + "-labels"))
        idx_write(images_path, labels_path, images, [0, 0, 0, 1, 1, 1])
        args += ["--%s-images" % split, images_path,
                 "--%s-labels" % split, labels_path]
    return args


def _tiny():
    return ["--epochs", "2", "--hidden-dim", "4", "--latent-dim", "2"]


def test_parser_subcommands():
    parser = parser_create()
    args = parser.parse_args(["semisup", "--seed", "3", "--metric", "rmse",
                              "--iterations", "all"])
    assert args.command == "semisup"
    assert args.seed == 3
    assert args.metric == "rmse"
    assert args.iterations == "all"
    assert args.checkpoint is None


def test_parser_psi_help_describes_total_budget():
    parser = parser_create()
    commands = [action for action in parser._actions
                if action.dest == "command"][0]
    semisup = commands.choices["semisup"]
    psi = [action for action in semisup._actions if action.dest == "psi"][0]
    assert psi.help == ("samples consumed per iteration over all classes, "
                        "each class claims psi // |C|")


def test_main_supervised_writes_outputs(tmp_path):
    out = str(tmp_path / "out")
    code = main(["supervised", "--seed", "4", "--out", out] +
                _idx_args(tmp_path) + _tiny())
    assert code == 0
    assert sorted(os.listdir(out)) == ["movae.log", "summary.json",
                                      "timings.json"]
    with open(os.path.join(out, "summary.json")) as handle:
        summary = json.load(handle)
    metrics_record_validate(summary)
    assert summary["protocol"] == "supervised"
    assert summary["config"]["seed"] == 4


def test_main_semisup_trace_and_checkpoint(tmp_path):
    out = str(tmp_path / "out")
    code = main(["semisup", "--seed", "4", "--out", out, "--psi", "2",
                 "--iterations", "1", "--checkpoint"] +
                _idx_args(tmp_path) + _tiny())
    assert code == 0
    assert os.path.exists(os.path.join(out, "trace-0.csv"))
    assert os.path.exists(os.path.join(out, "mixture-0.ckpt"))
    with open(os.path.join(out, "trace-0.csv")) as handle:
        assert handle.readline() == "iteration,pool_size,accuracy\n"


def test_main_run_with_config_file(tmp_path):
    out = str(tmp_path / "out")
    cfg = tmp_path / "experiment.cfg"
    args = _idx_args(tmp_path)
    lines = ["protocol = supervised", "seed = 6", "out = %s" % out]
    for flag, value in zip(args[::2], args[1::2]):
        lines.append("%s = %s" % (flag[2:], value))
    cfg.write_text("\n".join(lines) + "\n")
    code = main(["run", "--config", str(cfg), "--seed", "7"] + _tiny())
    assert code == 0
    with open(os.path.join(out, "summary.json")) as handle:
        assert json.load(handle)["config"]["seed"] == 7


def test_main_missing_seed_exit_code(tmp_path):
    assert main(["supervised"] + _idx_args(tmp_path)) == 2


def test_main_bad_arguments_exit_code():
    assert main([]) == 2
    assert main(["semisup", "--metric", "cosine", "--seed", "1"]) == 2
    assert main(["semisup", "--seed", "one"]) == 2


def test_main_missing_file_exit_code(tmp_path):
    args = _idx_args(tmp_path)
    args[args.index("--test-labels") + 1] = str(tmp_path / "absent")
    assert main(["supervised", "--seed", "1", "--out",
                 str(tmp_path / "out")] + args + _tiny()) == 8


def test_main_format_error_exit_code(tmp_path):
    args = _idx_args(tmp_path)
    # a label file where an image file is expected
    args[args.index("--train-images") + 1] = args[
        args.index("--train-labels") + 1]
    assert main(["supervised", "--seed", "1", "--out",
                 str(tmp_path / "out")] + args + _tiny()) == 6


@patch('movae.harness.cli.protocol_runners')
def test_main_dispatch_and_errors(mock_runners, tmp_path):
    record = MetricsRecord("oneshot", {})
    record.repeat_add(0.5)
    runner = mock_runners.__getitem__.return_value
    runner.return_value = record
    tree = str(tmp_path / "tree")
    out = str(tmp_path / "out")
    assert main(["oneshot", "--seed", "1", "--omniglot-dir", tree,
                 "--out", out]) == 0
    mock_runners.__getitem__.assert_called_with("oneshot")
    config = runner.call_args[0][0]
    assert config.omniglot_dir == tree

    runner.side_effect = MovaeNumericalError("train_epochs", "nan")
    assert main(["oneshot", "--seed", "1", "--omniglot-dir", tree,
                 "--out", out]) == 4
    runner.side_effect = RuntimeError("boom")
    assert main(["oneshot", "--seed", "1", "--omniglot-dir", tree,
                 "--out", out]) == 1


def test_main_convert(tmp_path, capsys):
    source = tmp_path / "source"
    for name in ("a", "b"):
        os.makedirs(str(source / name))
        pgm_write(str(source / name / "0.pgm"), np.ones((105, 105)))
    dest = str(tmp_path / "dest")
    assert main(["convert", "--omniglot-dir", str(source), "--dest",
                 dest]) == 0
    assert json.loads(capsys.readouterr().out) == {"classes": 2,
                                                   "images": 2}
    assert sorted(os.listdir(dest)) == ["a", "b"]
    assert main(["convert", "--omniglot-dir", str(tmp_path / "absent")]) == 8


def test_main_removes_handlers(tmp_path):
    before = list(logging.getLogger('movae').handlers)
    main(["supervised"] + _idx_args(tmp_path))
    assert logging.getLogger('movae').handlers == before
