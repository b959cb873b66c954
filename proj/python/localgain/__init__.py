"""Decentralized local-gain damping certificates for inverter-based power systems."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
