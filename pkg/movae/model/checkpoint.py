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
This module saves and loads mixtures.

Layout, little endian:
    b"MOVAE", u16 version, u8 metric (0 pcc, 1 rmse),
    u32 input_dim, hidden_dim, latent_dim, epochs, batch_size (0 = auto),
    u32 member count, then per member:
        u8 label kind (0 int, 1 str), u16 label byte length, label bytes,
        float32 weights then bias of every layer in VaeModel.layer_names
        order.
"""
import struct

import numpy as np

from ..evaluation.metrics import METRIC_KINDS
from ..movaeexception import MovaeFormatError
from ..movaeexception import MovaeIOError
from ..nn.prng import Prng
from .mixture import Mixture
from .vae import VaeConfig
from .vae import vae_create

CHECKPOINT_MAGIC = b"MOVAE"
CHECKPOINT_VERSION = 1

_header = struct.Struct("<5sHB6I")
_label_header = struct.Struct("<BH")
_INT_LABEL = 0
_STR_LABEL = 1


def _label_encode(label):
    if isinstance(label, (int, np.integer)):
        return _INT_LABEL, str(int(label)).encode("utf-8")
    return _STR_LABEL, str(label).encode("utf-8")


def save_checkpoint(mixture, path):
    """
    Writes the weights of every member of a mixture.

    Args:
        mixture (Mixture)
        path (string): destination file

    Returns:
        None

    Raises:
        MovaeIOError: if path cannot be written

    Example:
        save_checkpoint(mixture, "out/mixture-0.ckpt")
    """
    config = mixture.config
    chunks = [_header.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
                           METRIC_KINDS.index(mixture.metric),
                           config.input_dim, config.hidden_dim,
                           config.latent_dim, config.epochs,
                           config.batch_size or 0, len(mixture))]
    for label, model in mixture.members:
        kind, data = _label_encode(label)
        chunks.append(_label_header.pack(kind, len(data)))
        chunks.append(data)
        for param in model.parameters():
            chunks.append(np.asarray(param, dtype="<f4").tobytes())
    try:
        with open(path, "wb") as handle:
            handle.write(b"".join(chunks))
    except (IOError, OSError) as error:
        raise MovaeIOError("save_checkpoint", "cannot write '%s': %s" %
                           (path, error))


class _Reader(object):

    def __init__(self, blob, path):
        self.blob = blob
        self.path = path
        self.position = 0

    def take(self, size):
        if self.position + size > len(self.blob):
            raise MovaeIOError("load_checkpoint", "'%s' is truncated" %
                               self.path)
        chunk = self.blob[self.position:self.position + size]
        self.position += size
        return chunk


def load_checkpoint(path):
    """
    Reads a mixture written by save_checkpoint.

    Args:
        path (string): checkpoint file

    Returns:
        Mixture: trained mixture with bit-identical weights

    Raises:
        MovaeIOError: if the file is missing or truncated
        MovaeFormatError: on a bad magic or unsupported version

    Example:
        mixture = load_checkpoint("out/mixture-0.ckpt")
    """
    try:
        with open(path, "rb") as handle:
            blob = handle.read()
    except (IOError, OSError) as error:
        raise MovaeIOError("load_checkpoint", "cannot read '%s': %s" %
                           (path, error))
    reader = _Reader(blob, path)
    head = reader.take(len(CHECKPOINT_MAGIC))
    if head != CHECKPOINT_MAGIC:
        raise MovaeFormatError("load_checkpoint", "'%s' is not a movae "
                               "checkpoint (magic %r)" % (path, head))
    reader.position = 0
    (_, version, metric, input_dim, hidden_dim, latent_dim, epochs,
     batch_size, count) = _header.unpack(reader.take(_header.size))
    if version != CHECKPOINT_VERSION:
        raise MovaeFormatError(
            "load_checkpoint", "'%s' has version %d, expected %d" %
            (path, version, CHECKPOINT_VERSION))
    if metric >= len(METRIC_KINDS):
        raise MovaeFormatError("load_checkpoint", "'%s' has unknown metric "
                               "code %d" % (path, metric))
    config = VaeConfig(input_dim, hidden_dim, latent_dim, epochs,
                       batch_size or None)

    members = []
    for _ in range(count):
        kind, length = _label_header.unpack(reader.take(_label_header.size))
        text = reader.take(length).decode("utf-8")
        label = int(text) if kind == _INT_LABEL else text
        # the template only supplies shapes; every value is overwritten
        model = vae_create(config, Prng(0))
        for param in model.parameters():
            data = reader.take(param.size * 4)
            param[...] = np.frombuffer(data, dtype="<f4").reshape(
                param.shape)
        members.append((label, model))
    if reader.position != len(blob):
        raise MovaeFormatError("load_checkpoint", "'%s' has %d trailing "
                               "bytes" % (path, len(blob) - reader.position))
    return Mixture(members, config, metric=METRIC_KINDS[metric],
                   trained=True)
