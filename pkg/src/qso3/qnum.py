"""q-numbers, q-factorials and q-binomials for a real deformation q = exp(tau).

All brackets use the symmetric convention ``[x] = (q^x - q^-x) / (q - q^-1)``,
evaluated as ``sinh(tau*x) / sinh(tau)`` so the classical limit is reached
without cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "CLASSICAL_CUTOFF",
    "DeformationParam",
    "as_param",
    "q_number",
    "q_number_scaled",
    "q_factorial",
    "q_double_factorial",
    "q_binomial",
]

# below this |tau| every bracket is replaced by its q = 1 value
CLASSICAL_CUTOFF = 1e-12


@dataclass(frozen=True)
class DeformationParam:
    """Real deformation parameter; ``q = exp(tau)``."""

    tau: float = 0.0

    def __post_init__(self):
        tau = float(self.tau)
        if not math.isfinite(tau):
            raise ValueError(f"tau must be finite, got {self.tau!r}")
        object.__setattr__(self, "tau", tau)

    @property
    def q(self) -> float:
        return math.exp(self.tau)

    @property
    def classical(self) -> bool:
        return abs(self.tau) < CLASSICAL_CUTOFF

    def power(self, x: float) -> float:
        """``q**x`` computed as ``exp(tau*x)``."""
        return math.exp(self.tau * x)

    def scaled(self, s: float) -> "DeformationParam":
        """Parameter for the base ``q**s``."""
        return DeformationParam(self.tau * s)

    def inverted(self) -> "DeformationParam":
        return DeformationParam(-self.tau)


def as_param(p) -> DeformationParam:
    if isinstance(p, DeformationParam):
        return p
    return DeformationParam(float(p))


def q_number(x: float, p: DeformationParam) -> float:
    """The bracket ``[x]``; odd in ``x`` and equal to ``x`` at ``tau = 0``."""
    p = as_param(p)
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x!r}")
    if p.classical:
        return float(x)
    return math.sinh(p.tau * x) / math.sinh(p.tau)


def q_number_scaled(x: float, s: float, p: DeformationParam) -> float:
    """``[x]`` in base ``q**s`` (e.g. ``s = 2`` for ``[.]_{q^2}``)."""
    return q_number(x, as_param(p).scaled(s))


def _check_int(n, name: str, lower: int) -> int:
    if int(n) != n:
        raise ValueError(f"{name} must be an integer, got {n!r}")
    n = int(n)
    if n < lower:
        raise ValueError(f"{name} must be >= {lower}, got {n}")
    return n


def q_factorial(n: int, p: DeformationParam) -> float:
    """``[n]! = [1][2]...[n]`` with ``[0]! = 1``."""
    n = _check_int(n, "n", 0)
    p = as_param(p)
    out = 1.0
    for k in range(1, n + 1):
        out *= q_number(k, p)
    return out


def q_double_factorial(n: int, p: DeformationParam) -> float:
    """``[n]!! = [n][n-2]...`` ending at ``[2]`` or ``[1]``.

    Both ``[0]!!`` and ``[-1]!!`` are the empty product 1.
    """
    n = _check_int(n, "n", -1)
    p = as_param(p)
    out = 1.0
    for k in range(2 - n % 2, n + 1, 2):
        out *= q_number(k, p)
    return out


def q_binomial(k: int, t: int, s: float, p: DeformationParam) -> float:
    """Gaussian binomial ``[k]!/([t]![k-t]!)`` in base ``q**s``."""
    k = _check_int(k, "k", 0)
    t = _check_int(t, "t", 0)
    if t > k:
        raise ValueError(f"binomial needs 0 <= t <= k, got t={t}, k={k}")
    ps = as_param(p).scaled(s)
    t = min(t, k - t)
    out = 1.0
    for i in range(1, t + 1):
        out *= q_number(k - t + i, ps) / q_number(i, ps)
    return out
