"""Sieve tables, uniformity norms and prime-pattern experiments."""

from sievelab._core import *  # noqa: F401,F403
from sievelab._core import __doc__  # noqa: F401
