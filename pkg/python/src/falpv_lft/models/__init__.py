from falpv_lft.models.errors import *  # noqa: F403
from falpv_lft.models.models import *  # noqa: F403
from falpv_lft.models.schemas import *  # noqa: F403
from falpv_lft.models.types import *  # noqa: F403
