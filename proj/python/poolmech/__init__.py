"""Joint information structure and menu design for a monopolist."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
