# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0


import logging
import os
from logging.config import dictConfig
from typing import Optional

import dndelab.models.constants
import dndelab.models.errors

"""
Logs go to stderr (stream) or to a file which is either watched (logrotate style rotation)
or rotated by size. Every policy shares the same formatter.
"""

FORMAT = "[%(asctime)s.%(msecs)03d] %(levelname)s %(name)s:%(funcName)s: %(message)s"
DATE_FORMAT = "%d/%b/%Y:%H:%M:%S"

LOG_TYPES = ("stream", "watched", "rotating")


class LogSetup(object):
    def __init__(
            self,
            level: Optional[str] = None,
            log_type: Optional[str] = None,
            log_dir: Optional[str] = None,
            log_name: Optional[str] = None,
            max_bytes: Optional[int] = None,
            copies: Optional[int] = None,
    ):
        self.level = (level or dndelab.models.constants.LOG_LEVEL).upper()
        self.log_type = log_type or dndelab.models.constants.LOG_TYPE
        self.log_dir = log_dir or dndelab.models.constants.LOG_DIR
        self.log_name = log_name or dndelab.models.constants.LOG_NAME
        self.max_bytes = max_bytes if max_bytes is not None else dndelab.models.constants.LOG_MAX_BYTES
        self.copies = copies if copies is not None else dndelab.models.constants.LOG_COPIES

        if self.log_type not in LOG_TYPES:
            raise dndelab.models.errors.ConfigError(
                f"Unknown log type {self.log_type}, valid types are {', '.join(LOG_TYPES)}")
        if not isinstance(logging.getLevelName(self.level), int):
            raise dndelab.models.errors.ConfigError(f"Unknown log level {self.level}")

    @property
    def log_file(self) -> str:
        return os.path.join(self.log_dir, self.log_name)

    def handler(self):
        if self.log_type == "stream":
            return {
                "level": self.level,
                "formatter": "default",
                "class": "logging.StreamHandler",
            }

        os.makedirs(self.log_dir, exist_ok=True)

        if self.log_type == "watched":
            return {
                "level": self.level,
                "class": "logging.handlers.WatchedFileHandler",
                "filename": self.log_file,
                "formatter": "default",
                "delay": True,
            }

        return {
            "level": self.level,
            "class": "logging.handlers.RotatingFileHandler",
            "filename": self.log_file,
            "backupCount": self.copies,
            "maxBytes": self.max_bytes,
            "formatter": "default",
            "delay": True,
        }

    def log_config(self):
        return {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "default": {"format": FORMAT, "datefmt": DATE_FORMAT},
            },
            "handlers": {"default": self.handler()},
            "root": {"level": self.level, "handlers": ["default"]},
        }

    def apply(self):
        dictConfig(self.log_config())
