"""Ensemble optimal control for the Liouville equation."""

from pathlib import Path

from ._ensctl import (
    Config,
    Error,
    Problem,
    cost,
    forward,
    gradient,
    initial_control,
    optimize,
    run,
)


def load(path):
    """Parses a scenario file into a Config."""
    return Config.from_json(Path(path).read_text())


__all__ = [
    "Config",
    "Error",
    "Problem",
    "cost",
    "forward",
    "gradient",
    "initial_control",
    "load",
    "optimize",
    "run",
]
