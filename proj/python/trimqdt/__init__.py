"""H3 Rydberg-level toolkit: hyperspherical ion solver, frame transformation and MQDT."""

from ._trimqdt import *  # noqa: F401,F403
from ._trimqdt import __version__  # noqa: F401
