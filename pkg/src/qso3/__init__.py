"""q-deformed so_q(3) inside symmetric u_q(3) irreps: bases, tensors, quadrupole matrix elements."""

from .errors import CapacityError, IntegrityError
from .qnum import (
    DeformationParam,
    q_binomial,
    q_double_factorial,
    q_factorial,
    q_number,
    q_number_scaled,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "IntegrityError",
    "DeformationParam",
    "q_number",
    "q_number_scaled",
    "q_factorial",
    "q_double_factorial",
    "q_binomial",
]
