"""Mean-field WGAN training dynamics: particle simulation, transport distances and the bimodal toy."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, _run


def run(config):
    """Run an experiment from a config dict; returns the summary dict."""
    result = _run(_json.dumps(config))
    return _json.loads(result)


__all__ = [name for name in dir() if not name.startswith("_")]
