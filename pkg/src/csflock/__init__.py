"""Discrete-time Cucker-Smale flocking under rooted leadership with alternating leaders.

Submodules:

``topology``
    digraphs, rootedness, composition, switching signals
``stochastic``
    floor/bracket calculus for row-stochastic matrices
``dynamics``
    the flocking model, flocking matrices and the reference system
``theory``
    decay envelopes, the self-bounding root solver and flocking certificates
``harness``
    configuration files, experiment runs, dwell sweeps and CSV output
"""

from . import dynamics, harness, stochastic, theory, topology
from .dynamics import *  # noqa: F401,F403
from .errors import ConfigError, DimensionError, ParameterError
from .stochastic import *  # noqa: F401,F403
from .theory import *  # noqa: F401,F403
from .topology import *  # noqa: F401,F403

__version__ = "0.1.0"

__all__ = [
    *topology.__all__,
    *stochastic.__all__,
    *dynamics.__all__,
    *theory.__all__,
    "harness",
    "ConfigError",
    "DimensionError",
    "ParameterError",
]
