from falpv_lft.models import *  # noqa: F403
from falpv_lft.version import __version__ as __version__
