import pytest

from movae.harness.config import ONESHOT
from movae.harness.config import SEMISUP
from movae.harness.config import SUPERVISED
from movae.harness.config import config_file_read
from movae.harness.config import experiment_config_create
from movae.model.vae import VaeConfig
from movae.movaeexception import MovaeArgumentError
from movae.movaeexception import MovaeIOError

idx_paths = {"train_images": "ti", "train_labels": "tl",
             "test_images": "vi", "test_labels": "vl"}


def _write(tmp_path, text):
    path = tmp_path / "experiment.cfg"
    path.write_text(text)
    return str(path)


def test_config_file_read(tmp_path):
    path = _write(tmp_path, "# 1-shot mnist\nprotocol = semisup\n"
                            "seed=7\ntrain-images = data/ti\n")
    assert config_file_read(path) == {"protocol": "semisup", "seed": "7",
                                      "train_images": "data/ti"}


def test_config_file_read_unknown_key(tmp_path):
    path = _write(tmp_path, "seed = 1\nlearning_rat = 0.1\n")
    expected_error_message = ("config_file_read failed, error: unknown key "
                              "'learning_rat' in '%s'" % path)
    with pytest.raises(MovaeArgumentError) as error:
        config_file_read(path)
    assert error.value.message == expected_error_message


def test_config_file_read_malformed(tmp_path):
    with pytest.raises(MovaeArgumentError):
        config_file_read(_write(tmp_path, "seed 1\n"))
    with pytest.raises(MovaeIOError):
        config_file_read(str(tmp_path / "absent.cfg"))


def test_experiment_config_defaults():
    config = experiment_config_create(idx_paths, {"seed": 1},
                                      protocol=SEMISUP)
    assert config.protocol == SEMISUP
    assert config.psi == 3000
    assert config.iterations is None
    assert config.pool_size == 500
    assert config.metric == "pcc"
    assert config.vae_config() == VaeConfig(784, 256, 50, 40)
    assert config.optimizer() == {"learning_rate": 0.001}
    generalization = config.generalization_config()
    assert generalization.psi == 3000
    assert generalization.max_iterations is None
    assert not generalization.cold_restart


def test_experiment_config_oneshot_family():
    config = experiment_config_create({"omniglot_dir": "tree"},
                                      {"seed": 2, "latent_dim": 20},
                                      protocol=ONESHOT)
    assert config.vae_config() == VaeConfig(784, 784, 20, 50)
    assert config.augment == "omniglot"
    assert config.augment_policy().rotation_deg == 20
    spec = config.episode_spec()
    assert (spec.n_way, spec.k_shot, spec.test_per_class) == (5, 1, 19)


def test_experiment_config_precedence():
    file_values = dict(idx_paths, psi="100", seed="3", protocol="supervised")
    config = experiment_config_create(file_values, {"psi": 40, "seed": None})
    assert config.protocol == SUPERVISED
    assert config.psi == 40
    assert config.seed == 3
    forced = experiment_config_create(file_values, {}, protocol=SEMISUP)
    assert forced.protocol == SEMISUP


def test_experiment_config_conversions():
    values = dict(idx_paths, seed="4", iterations="all", cold_restart="yes",
                  checkpoint="false", learning_rate="0.01")
    config = experiment_config_create(values, protocol=SEMISUP)
    assert config.iterations is None
    assert config.cold_restart is True
    assert config.checkpoint is False
    assert config.learning_rate == 0.01
    assert experiment_config_create(
        dict(values, iterations="5"), protocol=SEMISUP).iterations == 5


def test_experiment_config_seed_mandatory():
    expected_error_message = ("experiment_config_create failed, error: seed "
                              "is mandatory")
    with pytest.raises(MovaeArgumentError) as error:
        experiment_config_create(idx_paths, protocol=SUPERVISED)
    assert error.value.message == expected_error_message


@pytest.mark.parametrize("override", [
    {"seed": -1},
    {"seed": 1, "metric": "cosine"},
    {"seed": 1, "augment": "cifar"},
    {"seed": 1, "family": "cifar"},
    {"seed": 1, "repeats": 0},
    {"seed": 1, "ways": 1},
    {"seed": 1, "shots": 0},
    {"seed": 1, "epochs": 0},
    {"seed": 1, "learning_rate": 0},
    {"seed": 1, "shots": 10, "pool_size": 5},
    {"seed": "seven"},
    {"seed": 1, "cold_restart": "maybe"},
])
def test_experiment_config_invalid(override):
    with pytest.raises(MovaeArgumentError):
        experiment_config_create(idx_paths, override, protocol=SEMISUP)


def test_experiment_config_missing_paths():
    expected_error_message = ("experiment_config_create failed, error: "
                              "'omniglot_dir' is required by the oneshot "
                              "protocol")
    with pytest.raises(MovaeArgumentError) as error:
        experiment_config_create({}, {"seed": 1}, protocol=ONESHOT)
    assert error.value.message == expected_error_message


def test_experiment_config_protocol_check():
    with pytest.raises(MovaeArgumentError):
        experiment_config_create(idx_paths, {"seed": 1})
    with pytest.raises(MovaeArgumentError):
        experiment_config_create(idx_paths, {"seed": 1}, protocol="online")


def test_experiment_config_as_dict_echo():
    config = experiment_config_create(idx_paths, {"seed": 9},
                                      protocol=SUPERVISED)
    echo = config.as_dict()
    assert echo["seed"] == 9
    assert echo["train_images"] == "ti"
    assert list(echo) == sorted(echo)
