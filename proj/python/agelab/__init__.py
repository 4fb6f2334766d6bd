"""Python surface of the agelab C++ core."""

from ._agelab import *  # noqa: F401,F403
from ._agelab import __doc__  # noqa: F401
