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

import logging

__author__ = """Cisco Ucs"""
__email__ = 'ucs-python@cisco.com'
__version__ = '0.9.0.0'

log = logging.getLogger('movae')
log.addHandler(logging.NullHandler())


def set_log_level(level=logging.DEBUG):
    """
    Sets the log level of the movae logger.

    Args:
        level (int): logging level, e.g. logging.INFO

    Returns:
        None

    Example:
        set_log_level(logging.INFO)
    """
    log.setLevel(level)
