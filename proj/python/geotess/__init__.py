from ._geotess import *  # noqa: F401,F403
from ._geotess import __version__  # noqa: F401
