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
This module reads and writes MNIST-format IDX files.

Layout (big endian): u32 magic, u32 count, [u32 rows, u32 cols], then
one unsigned byte per pixel or label.
"""
import struct

import numpy as np

from ..movaeexception import MovaeConsistencyError
from ..movaeexception import MovaeFormatError
from ..movaeexception import MovaeIOError
from .datasets import LabeledDataset

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


def _read(path, caller):
    try:
        with open(path, "rb") as handle:
            return handle.read()
    except (IOError, OSError) as error:
        raise MovaeIOError(caller, "cannot read '%s': %s" % (path, error))


def _header(blob, fields, path, caller):
    size = 4 * fields
    if len(blob) < size:
        raise MovaeIOError(caller, "'%s' is truncated in its header" % path)
    return struct.unpack(">%dI" % fields, blob[:size])


def _magic_check(magic, expected, path, caller):
    if magic != expected:
        raise MovaeFormatError(
            caller, "'%s' has magic 0x%08X, expected 0x%08X" %
            (path, magic, expected))


def idx_images_read(path):
    """
    Reads an IDX image file.

    Args:
        path (string): image file path

    Returns:
        numpy.ndarray: [count x rows x cols] uint8 pixels

    Raises:
        MovaeIOError: if the file is missing or truncated
        MovaeFormatError: on a bad magic number
    """
    blob = _read(path, "idx_images_read")
    magic, count, rows, cols = _header(blob, 4, path, "idx_images_read")
    _magic_check(magic, IDX_IMAGE_MAGIC, path, "idx_images_read")
    expected = count * rows * cols
    pixels = np.frombuffer(blob, dtype=np.uint8, offset=16)
    if pixels.size < expected:
        raise MovaeIOError(
            "idx_images_read", "'%s' holds %d of %d pixel bytes" %
            (path, pixels.size, expected))
    return pixels[:expected].reshape(count, rows, cols)


def idx_labels_read(path):
    """
    Reads an IDX label file.

    Args:
        path (string): label file path

    Returns:
        numpy.ndarray: uint8 labels

    Raises:
        MovaeIOError: if the file is missing or truncated
        MovaeFormatError: on a bad magic number
    """
    blob = _read(path, "idx_labels_read")
    magic, count = _header(blob, 2, path, "idx_labels_read")
    _magic_check(magic, IDX_LABEL_MAGIC, path, "idx_labels_read")
    labels = np.frombuffer(blob, dtype=np.uint8, offset=8)
    if labels.size < count:
        raise MovaeIOError(
            "idx_labels_read", "'%s' holds %d of %d labels" %
            (path, labels.size, count))
    return labels[:count]


def load_idx(images_path, labels_path):
    """
    Loads an IDX image/label file pair with pixels scaled to [0, 1].

    Args:
        images_path (string): IDX image file
        labels_path (string): IDX label file

    Returns:
        LabeledDataset: flattened images and integer labels

    Raises:
        MovaeIOError: if a file is missing or truncated
        MovaeFormatError: on a bad magic number
        MovaeConsistencyError: if the files hold different counts

    Example:
        mnist = load_idx("train-images-idx3-ubyte",
                         "train-labels-idx1-ubyte")
    """
    images = idx_images_read(images_path)
    labels = idx_labels_read(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise MovaeConsistencyError(
            "load_idx", "%d images in '%s' but %d labels in '%s'" %
            (images.shape[0], images_path, labels.shape[0], labels_path))
    flat = images.reshape(images.shape[0], -1).astype(np.float32) / 255.0
    return LabeledDataset(flat, labels.tolist())


def idx_write(images_path, labels_path, images, labels):
    """
    Writes uint8 images [n x rows x cols] and labels as an IDX pair.

    Example:
        idx_write("imgs", "lbls", np.zeros((2, 28, 28), np.uint8), [3, 4])
    """
    images = np.asarray(images, dtype=np.uint8)
    labels = np.asarray(labels, dtype=np.uint8)
    count, rows, cols = images.shape
    with open(images_path, "wb") as handle:
        handle.write(struct.pack(">4I", IDX_IMAGE_MAGIC, count, rows, cols))
        handle.write(images.tobytes())
    with open(labels_path, "wb") as handle:
        handle.write(struct.pack(">2I", IDX_LABEL_MAGIC, labels.size))
        handle.write(labels.tobytes())
