from .operators import *  # noqa: F401,F403
from .operators import __all__ as _ops_all
from .space import *  # noqa: F401,F403
from .space import __all__ as _space_all

__all__ = list(_space_all) + list(_ops_all)
