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
This module contains the exceptions raised by movae.
"""


class MovaeOperationError(Exception):
    """
    Base class of every movae error.

    Args:
        operation (string): name of the failing operation
        error (string): reason of the failure
    """
    exit_code = 1

    def __init__(self, operation, error):
        self.operation = operation
        self.error = error
        self.message = "%s failed, error: %s" % (operation, error)
        Exception.__init__(self, self.message)

    def __str__(self):
        return self.message


class MovaeArgumentError(MovaeOperationError):
    """Invalid argument or configuration value."""
    exit_code = 2


class MovaeDimensionError(MovaeOperationError):
    """Array shape does not match what the operation expects."""
    exit_code = 3


class MovaeNumericalError(MovaeOperationError):
    """Non-finite loss, gradient or parameter."""
    exit_code = 4


class MovaeDomainError(MovaeOperationError):
    """Value outside the domain of the operation."""
    exit_code = 5


class MovaeFormatError(MovaeOperationError):
    """Malformed IDX, PGM or checkpoint file."""
    exit_code = 6


class MovaeConsistencyError(MovaeOperationError):
    """Inputs that are individually valid but disagree with each other."""
    exit_code = 7


class MovaeIOError(MovaeOperationError):
    """Missing, unreadable or truncated file."""
    exit_code = 8


class MovaeStateError(MovaeOperationError):
    """Object used before it is ready, e.g. an untrained mixture."""
    exit_code = 9
