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
This module performs the operations on Omniglot-style PGM trees:
reading and writing binary P5 files, 105x105 -> 28x28 downsampling,
loading a class-per-directory tree and converting such a tree.

Tree layout: <root>/<class>/<sample>.pgm, or
<root>/<alphabet>/<character>/<sample>.pgm whose classes are named
"<alphabet>__<character>".
"""
import logging
import os
import re

import numpy as np

from ..movaeexception import MovaeConsistencyError
from ..movaeexception import MovaeDimensionError
from ..movaeexception import MovaeFormatError
from ..movaeexception import MovaeIOError
from .datasets import LabeledDataset

log = logging.getLogger('movae')

SOURCE_SIDE = 105
TARGET_SIDE = 28
CLASS_SEPARATOR = "__"

_token = re.compile(br"(#[^\n]*\n)|(\S+)")


def pgm_read(path):
    """
    Reads a binary (P5) PGM file.

    Args:
        path (string): file path

    Returns:
        numpy.ndarray: [height x width] float32 values in [0, 1]

    Raises:
        MovaeIOError: if the file is missing or truncated
        MovaeFormatError: if the file is not P5 or maxval is not 1..255

    Example:
        image = pgm_read("omniglot/a/0001.pgm")
    """
    try:
        with open(path, "rb") as handle:
            blob = handle.read()
    except (IOError, OSError) as error:
        raise MovaeIOError("pgm_read", "cannot read '%s': %s" %
                           (path, error))

    fields = []
    position = 0
    while len(fields) < 4:
        match = _token.search(blob, position)
        if match is None:
            raise MovaeFormatError("pgm_read", "'%s' has an incomplete "
                                   "header" % path)
        position = match.end()
        if match.group(2) is not None:
            fields.append(match.group(2))
            if len(fields) == 1 and fields[0] != b"P5":
                raise MovaeFormatError(
                    "pgm_read", "'%s' is not a binary PGM (P5) file" % path)
    try:
        width, height, maxval = [int(field) for field in fields[1:]]
    except ValueError:
        raise MovaeFormatError("pgm_read", "'%s' has a malformed header" %
                               path)
    if not 0 < maxval <= 255:
        raise MovaeFormatError("pgm_read", "'%s' has maxval %d, only 8-bit "
                               "files are supported" % (path, maxval))

    # exactly one whitespace byte follows maxval
    start = position + 1
    pixels = np.frombuffer(blob, dtype=np.uint8, offset=min(start,
                                                            len(blob)))
    if pixels.size < width * height:
        raise MovaeIOError("pgm_read", "'%s' holds %d of %d pixel bytes" %
                           (path, pixels.size, width * height))
    image = pixels[:width * height].reshape(height, width)
    return image.astype(np.float32) / float(maxval)


def pgm_write(path, image):
    """
    Writes a [height x width] image with values in [0, 1] as P5.
    """
    image = np.asarray(image, dtype=np.float64)
    height, width = image.shape
    data = np.round(np.clip(image, 0, 1) * 255).astype(np.uint8)
    with open(path, "wb") as handle:
        handle.write(b"P5\n%d %d\n255\n" % (width, height))
        handle.write(data.tobytes())


def _area_weights(source, target):
    scale = source / float(target)
    weights = np.zeros((target, source))
    for out in range(target):
        low, high = out * scale, (out + 1) * scale
        for pixel in range(int(np.floor(low)), int(np.ceil(high))):
            overlap = min(high, pixel + 1) - max(low, pixel)
            if overlap > 0:
                weights[out, pixel] = overlap / scale
    return weights


_weights_105_28 = _area_weights(SOURCE_SIDE, TARGET_SIDE)


def downsample(image_105):
    """
    Area-average (box filter) resampling of a 105x105 image to 28x28.

    Every output pixel is the overlap-weighted mean of the input pixels
    its footprint covers, so the global mean and the value range are
    preserved.

    Args:
        image_105 (numpy.ndarray): [105 x 105] or 11025 values

    Returns:
        numpy.ndarray: [28 x 28] float32 image

    Raises:
        MovaeDimensionError: if the input is not 105x105

    Example:
        small = downsample(pgm_read("0001.pgm"))
    """
    image = np.asarray(image_105, dtype=np.float64)
    if image.size == SOURCE_SIDE * SOURCE_SIDE:
        image = image.reshape(SOURCE_SIDE, SOURCE_SIDE)
    if image.shape != (SOURCE_SIDE, SOURCE_SIDE):
        raise MovaeDimensionError(
            "downsample", "expected a %dx%d image, got shape %s" %
            (SOURCE_SIDE, SOURCE_SIDE, tuple(image.shape)))
    small = _weights_105_28.dot(image).dot(_weights_105_28.T)
    return np.clip(small, image.min(), image.max()).astype(np.float32)


def ink_normalise(image):
    """
    Inverts images drawn dark-on-white so that ink is high intensity.
    """
    if image.mean() > 0.5:
        return 1.0 - image
    return image


def _visible(names):
    return sorted(name for name in names if not name.startswith("."))


def pgm_class_dirs(root_dir):
    """
    Lists the class directories of a PGM tree.

    Args:
        root_dir (string): tree root

    Returns:
        list: (class name, directory path) pairs in sorted name order

    Raises:
        MovaeIOError: if root_dir is not a directory
        MovaeConsistencyError: if a class directory is empty
    """
    if not os.path.isdir(root_dir):
        raise MovaeIOError("pgm_class_dirs", "'%s' is not a directory" %
                           root_dir)
    classes = []
    for name in _visible(os.listdir(root_dir)):
        path = os.path.join(root_dir, name)
        if not os.path.isdir(path):
            continue
        entries = _visible(os.listdir(path))
        subdirs = [entry for entry in entries
                   if os.path.isdir(os.path.join(path, entry))]
        if not entries:
            raise MovaeConsistencyError(
                "pgm_class_dirs", "class directory '%s' is empty" % path)
        if subdirs and len(subdirs) == len(entries):
            for child in subdirs:
                child_path = os.path.join(path, child)
                if not _visible(os.listdir(child_path)):
                    raise MovaeConsistencyError(
                        "pgm_class_dirs", "class directory '%s' is empty" %
                        child_path)
                classes.append((name + CLASS_SEPARATOR + child, child_path))
        else:
            classes.append((name, path))
    return sorted(classes)


def _class_files(path):
    return [os.path.join(path, name) for name in _visible(os.listdir(path))
            if os.path.isfile(os.path.join(path, name))]


def pgm_image_load(path):
    """
    Reads one tree image as a flattened, ink-high 28x28 vector.

    Raises:
        MovaeDimensionError: if the image is neither 105x105 nor 28x28
    """
    image = pgm_read(path)
    if image.shape == (SOURCE_SIDE, SOURCE_SIDE):
        image = downsample(image)
    elif image.shape != (TARGET_SIDE, TARGET_SIDE):
        raise MovaeDimensionError(
            "pgm_image_load", "'%s' is %dx%d, expected 105x105 or 28x28" %
            ((path,) + image.shape[::-1]))
    return ink_normalise(image).reshape(-1)


def load_pgm_tree(root_dir):
    """
    Loads a PGM class tree, one class per directory.

    Args:
        root_dir (string): tree root

    Returns:
        LabeledDataset: 784-pixel images labelled with class names

    Raises:
        MovaeIOError: on a missing root or unreadable file
        MovaeFormatError: on a file that is not P5
        MovaeConsistencyError: on an empty class directory
        MovaeDimensionError: on an image of unsupported size

    Example:
        omniglot = load_pgm_tree("/data/omniglot_pgm")
    """
    images, labels = [], []
    for name, path in pgm_class_dirs(root_dir):
        files = _class_files(path)
        if not files:
            raise MovaeConsistencyError(
                "load_pgm_tree", "class directory '%s' is empty" % path)
        for file_path in files:
            images.append(pgm_image_load(file_path))
            labels.append(name)
    log.info("loaded %d images of %d classes from %s", len(images),
             len(set(labels)), root_dir)
    if not images:
        raise MovaeConsistencyError("load_pgm_tree",
                                    "'%s' holds no classes" % root_dir)
    return LabeledDataset(np.stack(images), labels)


def pgm_tree_convert(root_dir, dest_dir=None):
    """
    Validates a PGM tree and optionally writes a flat 28x28 copy.

    Args:
        root_dir (string): source tree, one or two directory levels
        dest_dir (string): destination root, nothing is written when None

    Returns:
        dict: {"classes": class count, "images": image count}

    Raises:
        as load_pgm_tree

    Example:
        pgm_tree_convert("/data/omniglot_105", "/data/omniglot_28")
    """
    n_classes = n_images = 0
    for name, path in pgm_class_dirs(root_dir):
        files = _class_files(path)
        if not files:
            raise MovaeConsistencyError(
                "pgm_tree_convert", "class directory '%s' is empty" % path)
        if dest_dir is not None:
            class_dest = os.path.join(dest_dir, name)
            if not os.path.isdir(class_dest):
                os.makedirs(class_dest)
        for file_path in files:
            image = pgm_image_load(file_path)
            if dest_dir is not None:
                stem = os.path.splitext(os.path.basename(file_path))[0]
                pgm_write(os.path.join(class_dest, stem + ".pgm"),
                          image.reshape(TARGET_SIDE, TARGET_SIDE))
            n_images += 1
        n_classes += 1
    return {"classes": n_classes, "images": n_images}
