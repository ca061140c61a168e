"""Optimal early stopping for gradient flow on linear least squares."""

import json

from ._stoplab import *  # noqa: F401,F403
from ._stoplab import run as _run, validate as _validate


def run_table(command, config=None):
    """Run a table subcommand and return its rows as a list of dicts."""
    return json.loads(_run(command, json.dumps(config or {}), "json"))


def run_csv(command, config=None):
    return _run(command, json.dumps(config or {}), "csv")


def validate(config=None):
    return json.loads(_validate(json.dumps(config or {})))
