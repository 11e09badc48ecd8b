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
This module performs the random affine augmentation used to grow tiny
labelled sets into training pools.
"""
import math

import numpy as np
from scipy import ndimage

from ..movaeexception import MovaeArgumentError
from ..utils.utils import positive_int_check

SIDE = 28


class AugmentPolicy(object):
    """
    Ranges of the random affine parameters.

    Args:
        rotation_deg (float): max absolute rotation in degrees
        shift_frac (float): max horizontal/vertical shift, fraction of side
        shear (float): max absolute x-axis shear factor
        zoom_range (tuple): (low, high) scale factors
        hflip (bool): flip horizontally with probability 0.5

    Raises:
        MovaeArgumentError: on an invalid range

    Example:
        policy = AugmentPolicy(rotation_deg=10, shift_frac=0.1)
    """

    def __init__(self, rotation_deg=0.0, shift_frac=0.0, shear=0.0,
                 zoom_range=(1.0, 1.0), hflip=False):
        low, high = zoom_range
        if rotation_deg < 0:
            raise MovaeArgumentError("AugmentPolicy",
                                     "rotation_deg must be >= 0")
        if not 0 <= shift_frac < 1:
            raise MovaeArgumentError("AugmentPolicy",
                                     "shift_frac must be in [0, 1)")
        if shear < 0:
            raise MovaeArgumentError("AugmentPolicy", "shear must be >= 0")
        if not 0 < low <= high:
            raise MovaeArgumentError(
                "AugmentPolicy", "zoom_range must satisfy 0 < low <= high, "
                "got %r" % (zoom_range,))
        self.rotation_deg = float(rotation_deg)
        self.shift_frac = float(shift_frac)
        self.shear = float(shear)
        self.zoom_range = (float(low), float(high))
        self.hflip = bool(hflip)


augment_policies = {
    "none": AugmentPolicy(),
    "mnist": AugmentPolicy(rotation_deg=10, shift_frac=0.1),
    "fashion": AugmentPolicy(zoom_range=(0.9, 1.1), hflip=True),
    "omniglot": AugmentPolicy(rotation_deg=20, shift_frac=0.2, shear=0.2,
                              zoom_range=(0.8, 1.2)),
}


def augment_policy_get(name):
    """
    Returns the named preset: "none", "mnist", "fashion" or "omniglot".

    Raises:
        MovaeArgumentError: on an unknown name
    """
    if name not in augment_policies:
        raise MovaeArgumentError(
            "augment_policy_get", "unknown augmentation '%s', valid values "
            "are %s" % (name, ", ".join(sorted(augment_policies))))
    return augment_policies[name]


class AffineTransform(object):
    """
    2x3 matrix mapping output (row, col) coordinates to input ones.

    The sampled parameters are kept alongside for inspection.
    """

    def __init__(self, matrix, angle_deg=0.0, shear=0.0, zoom=(1.0, 1.0),
                 shift=(0.0, 0.0), flipped=False):
        self.matrix = matrix
        self.angle_deg = angle_deg
        self.shear = shear
        self.zoom = zoom
        self.shift = shift
        self.flipped = flipped


def affine_transform_create(angle_deg=0.0, shear=0.0, zoom=(1.0, 1.0),
                            shift=(0.0, 0.0), flip=False, side=SIDE):
    """
    creates the transform for explicit parameters

    Output coordinates, centred on the image midpoint, are flipped,
    shifted back, unzoomed, sheared and rotated to find their source.

    Args:
        angle_deg (float): rotation in degrees
        shear (float): x-axis shear factor
        zoom (tuple): (x, y) scale factors, > 1 enlarges
        shift (tuple): (x, y) translation in pixels, +x moves content right
        flip (bool): horizontal flip
        side (int): image side in pixels

    Returns:
        AffineTransform

    Example:
        shift_right = affine_transform_create(shift=(2, 0))
    """
    theta = math.radians(angle_deg)
    cos, sin = math.cos(theta), math.sin(theta)
    rotate = np.array([[cos, sin], [-sin, cos]])
    shear_matrix = np.array([[1.0, 0.0], [shear, 1.0]])
    unzoom = np.diag([1.0 / zoom[1], 1.0 / zoom[0]])
    mirror = np.diag([1.0, -1.0 if flip else 1.0])

    linear = rotate.dot(shear_matrix).dot(unzoom)
    matrix = linear.dot(mirror)
    centre = np.array([(side - 1) / 2.0, (side - 1) / 2.0])
    offset = centre - matrix.dot(centre) - linear.dot(
        np.array([shift[1], shift[0]], dtype=np.float64))
    return AffineTransform(np.hstack([matrix, offset[:, np.newaxis]]),
                           angle_deg=angle_deg, shear=shear,
                           zoom=tuple(zoom), shift=tuple(shift),
                           flipped=bool(flip))


def sample_transform(policy, prng, side=SIDE):
    """
    Draws a random transform within the policy ranges.

    Every parameter is uniform in its range. The flip is taken with
    probability 0.5 when enabled.

    Args:
        policy (AugmentPolicy)
        prng (Prng): random stream
        side (int): image side in pixels

    Returns:
        AffineTransform

    Example:
        transform = sample_transform(augment_policy_get("mnist"), prng)
    """
    angle = prng.uniform(-policy.rotation_deg, policy.rotation_deg)
    shear_angle = math.atan(policy.shear)
    shear = math.tan(prng.uniform(-shear_angle, shear_angle))
    zoom = tuple(prng.uniform(policy.zoom_range[0], policy.zoom_range[1],
                              2))
    limit = policy.shift_frac * side
    shift = tuple(prng.uniform(-limit, limit, 2))
    flip = policy.hflip and prng.random() < 0.5
    return affine_transform_create(angle, shear, zoom, shift, flip, side)


def apply_transform(image, transform):
    """
    Warps an image with bilinear sampling and zero fill.

    Args:
        image (numpy.ndarray): 28x28 image or 784 vector in [0, 1]
        transform (AffineTransform)

    Returns:
        numpy.ndarray: warped image, same shape as image, in [0, 1]

    Example:
        flipped = apply_transform(image, affine_transform_create(flip=True))
    """
    image = np.asarray(image)
    shape = image.shape
    side = int(round(math.sqrt(image.size)))
    warped = ndimage.affine_transform(
        image.reshape(side, side).astype(np.float64),
        transform.matrix[:, :2], offset=transform.matrix[:, 2],
        order=1, mode="constant", cval=0.0)
    return np.clip(warped, 0.0, 1.0).astype(image.dtype).reshape(shape)


def augment_pool(images, policy, target_count, prng):
    """
    Grows a set of images to target_count with random transforms.

    The originals come first. Each extra image transforms the source
    images in round-robin order.

    Args:
        images (numpy.ndarray): [n x 784] source images, n >= 1
        policy (AugmentPolicy)
        target_count (int): pool size, >= n
        prng (Prng): random stream

    Returns:
        numpy.ndarray: [target_count x 784] images

    Raises:
        MovaeArgumentError: if images is empty or target_count < n

    Example:
        pool = augment_pool(shots, augment_policy_get("mnist"), 500, prng)
    """
    images = np.asarray(images)
    if images.ndim != 2 or images.shape[0] == 0:
        raise MovaeArgumentError("augment_pool", "no source images")
    positive_int_check(target_count, "target_count", "augment_pool",
                       minimum=images.shape[0])
    pool = np.empty((target_count, images.shape[1]), dtype=images.dtype)
    pool[:images.shape[0]] = images
    for position in range(images.shape[0], target_count):
        source = images[(position - images.shape[0]) % images.shape[0]]
        pool[position] = apply_transform(source,
                                         sample_transform(policy, prng))
    return pool
