"""FMD cover-traffic game toolkit: communication graphs, game utilities,
best-response dynamics, social-optimum search and equilibrium analysis."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
