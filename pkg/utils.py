# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0


import difflib
import json
import logging
import os.path
from typing import Any
from typing import Dict
from typing import List
from typing import Optional
from typing import Type

import pydantic

import dndelab.models.config
import dndelab.models.constants
import dndelab.models.errors


def get_config_json_path(path: Optional[str] = None) -> Optional[str]:
    """Returns the explicit path, else $DNDELAB_CONFIG_JSON_PATH, else ./dndelab.json if it exists"""
    if path:
        return path

    if dndelab.models.constants.CONFIG_JSON_PATH:
        return dndelab.models.constants.CONFIG_JSON_PATH

    if os.path.isfile(dndelab.models.constants.DEFAULT_CONFIG_FILENAME):
        return dndelab.models.constants.DEFAULT_CONFIG_FILENAME


def _unknown_keys(
        configuration: Dict[str, Any],
        model: Type[pydantic.BaseModel],
        location: List[str],
) -> List[Dict[str, Any]]:
    errors = []
    expected = list(model.model_fields)

    for k, value in configuration.items():
        if k not in model.model_fields:
            possibilities = difflib.get_close_matches(k, expected, cutoff=0.8)
            if possibilities:
                msg = 'Unknown key "%s" did you mean "%s" ?' % (k, possibilities[0])
            else:
                msg = 'Unknown key "%s", valid keys are %s' % (k, ', '.join(expected))
            errors.append({"message": msg, "location": location + [k]})
            continue

        annotation = model.model_fields[k].annotation
        if isinstance(value, dict) and isinstance(annotation, type) and issubclass(annotation, pydantic.BaseModel):
            errors.extend(_unknown_keys(value, annotation, location + [k]))

    return errors


def validate_config(configuration: Dict[str, Any]) -> None:
    """Validates the contents of a configuration dictionary (typically found in ./dndelab.json)

    Keys which are not part of the schema are errors; close matches are suggested. All problems are collected
    before raising.

    Returns:
        None: On success returns None

    Raises:
        dndelab.models.errors.ConfigError: when the configuration does not match the schema of ExperimentConfig
    """
    if not isinstance(configuration, dict):
        raise dndelab.models.errors.ConfigError(f"The configuration must be a JSON object, not {type(configuration)}")

    errors = _unknown_keys(configuration, dndelab.models.config.ExperimentConfig, [])

    try:
        dndelab.models.config.ExperimentConfig.parse(configuration)
    except dndelab.models.errors.ConfigError as e:
        known = {tuple(x["location"]) for x in errors}
        errors.extend(x for x in e.problems if tuple(x.get("location", ())) not in known)

    if errors:
        raise dndelab.models.errors.ConfigError("Invalid experiment configuration", errors)


def setup_config(path: Optional[str] = None, validate: bool = False) -> Dict[str, Any]:
    """Loads the experiment configuration, may validate it before returning its contents.

    Arguments:
        path: the JSON file; when unset @get_config_json_path() decides and a missing file means defaults
        validate(bool): Set to True to validate contents of configuration file

    Returns:
        The dictionary, {} when there is no configuration file

    Raises:
        dndelab.models.errors.ConfigError: if the file cannot be read or parsed, or if validation fails
    """
    logger = logging.getLogger(__name__)
    explicit = path is not None
    path = get_config_json_path(path)

    if path is None:
        logger.info("No configuration file, using the defaults")
        return {}

    if not os.path.isfile(path):
        if explicit or dndelab.models.constants.CONFIG_JSON_PATH:
            raise dndelab.models.errors.ConfigError(f"Configuration file {path} does not exist")
        return {}

    try:
        with open(path, encoding="utf-8") as f:
            configuration = json.load(f)
    except (OSError, ValueError) as e:
        raise dndelab.models.errors.ConfigError(f"Could not load configuration file {path}: {e}")

    logger.info(f"Loaded configuration {json.dumps(configuration)}")

    if validate:
        validate_config(configuration)

    return configuration


def parse_configuration(path: Optional[str] = None, validate: bool = True) -> dndelab.models.config.ExperimentConfig:
    """Loads the configuration settings

    Arguments:
        path: the JSON file, see @setup_config()
        validate(bool): Set to True to report every problem (with suggestions for misspelled keys)

    Returns:
        dndelab.models.config.ExperimentConfig
    """
    configuration = setup_config(path=path, validate=validate)
    return dndelab.models.config.ExperimentConfig.parse(configuration)
