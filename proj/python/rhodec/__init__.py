"""Decentralized POMDPs with belief-dependent rewards.

Thin wrapper over the compiled ``_rhodec`` extension.
"""

from ._rhodec import *  # noqa: F401,F403
from ._rhodec import tracking  # noqa: F401

__version__ = "0.1.0"
