"""Truncated three-mode Fock space and number-conserving block operators."""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from ..errors import CapacityError

__all__ = [
    "FockState",
    "FockSpace",
    "SectorOperator",
    "build_space",
    "residual",
    "sector_dim",
]

MODES = {"+": 0, "0": 1, "-": 2}


class FockState(NamedTuple):
    nplus: int
    nzero: int
    nminus: int

    @property
    def N(self) -> int:
        return self.nplus + self.nzero + self.nminus

    def shifted(self, mode: int, by: int) -> "FockState":
        occ = list(self)
        occ[mode] += by
        return FockState(*occ)


def sector_dim(N: int) -> int:
    return (N + 1) * (N + 2) // 2 if N >= 0 else 0


class FockSpace:
    """States with total boson number ``N <= nmax``, grouped by ``N``.

    Inside a sector, states are in ascending lexicographic order of
    ``(nplus, nzero, nminus)``.
    """

    def __init__(self, nmax: int):
        if nmax < 0:
            raise ValueError(f"nmax must be >= 0, got {nmax}")
        self.nmax = int(nmax)
        self.sectors: tuple[tuple[FockState, ...], ...] = tuple(
            tuple(
                FockState(a, b, N - a - b)
                for a in range(N + 1)
                for b in range(N - a + 1)
            )
            for N in range(self.nmax + 1)
        )
        self._index = [{s: i for i, s in enumerate(sec)} for sec in self.sectors]
        self._occ = [np.array(sec, dtype=float).reshape(-1, 3) for sec in self.sectors]

    def __repr__(self):
        return f"FockSpace(nmax={self.nmax})"

    def dim(self, N: int) -> int:
        return sector_dim(N) if 0 <= N <= self.nmax else 0

    @property
    def total_dim(self) -> int:
        return sum(len(s) for s in self.sectors)

    def index(self, state: FockState) -> int:
        return self._index[state.N][state]

    def occupations(self, N: int) -> np.ndarray:
        """``(dim, 3)`` array of ``(nplus, nzero, nminus)`` for sector ``N``."""
        return self._occ[N]

    def basis_vector(self, state: FockState) -> np.ndarray:
        if not 0 <= state.N <= self.nmax:
            raise CapacityError(f"{state} lies outside {self!r}")
        v = np.zeros(self.dim(state.N))
        v[self.index(state)] = 1.0
        return v

    def diagonal(self, fn: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]):
        """Diagonal operator with entries ``fn(nplus, nzero, nminus)`` (vectorised)."""
        blocks = {}
        for N in range(self.nmax + 1):
            occ = self._occ[N]
            vals = np.broadcast_to(
                np.asarray(fn(occ[:, 0], occ[:, 1], occ[:, 2]), dtype=float),
                (len(occ),),
            )
            blocks[N] = np.diag(vals)
        return SectorOperator(self, 0, blocks)

    def identity(self) -> "SectorOperator":
        return self.diagonal(lambda a, b, c: np.ones_like(a))

    def ladder(self, mode: str, shift: int, amplitude: Callable[[int], float]):
        """Single-mode hop ``|n> -> amplitude(n) |n + shift>`` in ``mode``."""
        k = MODES[mode]
        blocks = {}
        for N in range(self.nmax + 1):
            T = N + shift
            if T > self.nmax:
                continue
            block = np.zeros((self.dim(T), self.dim(N)))
            if T >= 0:
                for j, s in enumerate(self.sectors[N]):
                    n = s[k]
                    if n + shift < 0:
                        continue
                    block[self._index[T][s.shifted(k, shift)], j] = amplitude(n)
            blocks[N] = block
        return SectorOperator(self, shift, blocks)


def build_space(nmax: int) -> FockSpace:
    return FockSpace(nmax)


class SectorOperator:
    """Operator shifting total boson number by ``delta_n``, stored per source sector.

    ``blocks[N]`` maps sector ``N`` to sector ``N + delta_n``.  A missing block
    means the image is not known exactly inside the cutoff; products and
    sums only keep blocks whose every factor is present, so whatever survives
    is free of truncation error.
    """

    __slots__ = ("space", "delta_n", "blocks")

    def __init__(self, space: FockSpace, delta_n: int, blocks: dict):
        self.space = space
        self.delta_n = int(delta_n)
        frozen = {}
        for N, block in sorted(blocks.items()):
            block = np.array(block, dtype=float)
            want = (space.dim(N + delta_n), space.dim(N))
            if not 0 <= N <= space.nmax or N + delta_n > space.nmax:
                raise ValueError(f"block {N} -> {N + delta_n} outside {space!r}")
            if block.shape != want:
                raise ValueError(f"block {N} has shape {block.shape}, expected {want}")
            block.flags.writeable = False
            frozen[N] = block
        self.blocks = frozen

    def __repr__(self):
        return (
            f"SectorOperator(delta_n={self.delta_n}, "
            f"sectors={list(self.blocks)}, nmax={self.space.nmax})"
        )

    @property
    def sectors(self) -> list[int]:
        return list(self.blocks)

    def _same_space(self, other: "SectorOperator"):
        if not isinstance(other, SectorOperator):
            raise TypeError(f"expected SectorOperator, got {type(other).__name__}")
        if other.space.nmax != self.space.nmax:
            raise ValueError("operators live on different Fock spaces")

    def __matmul__(self, other: "SectorOperator") -> "SectorOperator":
        self._same_space(other)
        blocks = {}
        for N, right in other.blocks.items():
            mid = N + other.delta_n
            if mid < 0:
                # right factor maps sector N to nothing: the product is exactly zero
                target = mid + self.delta_n
                if target <= self.space.nmax:
                    blocks[N] = np.zeros((self.space.dim(target), right.shape[1]))
                continue
            left = self.blocks.get(mid)
            if left is not None:
                blocks[N] = left @ right
        return SectorOperator(self.space, self.delta_n + other.delta_n, blocks)

    def _combine(self, other, sign):
        self._same_space(other)
        if other.delta_n != self.delta_n:
            raise ValueError(
                f"cannot add operators with delta_n {self.delta_n} and {other.delta_n}"
            )
        common = self.blocks.keys() & other.blocks.keys()
        return SectorOperator(
            self.space,
            self.delta_n,
            {N: self.blocks[N] + sign * other.blocks[N] for N in common},
        )

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __neg__(self):
        return self * -1.0

    def __mul__(self, c):
        c = float(c)
        return SectorOperator(
            self.space, self.delta_n, {N: c * b for N, b in self.blocks.items()}
        )

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / float(c))

    def dagger(self) -> "SectorOperator":
        """Hermitian conjugate (transpose; every entry is real)."""
        blocks = {}
        for N, b in self.blocks.items():
            T = N + self.delta_n
            if 0 <= T <= self.space.nmax:
                blocks[T] = b.T
        return SectorOperator(self.space, -self.delta_n, blocks)

    def power(self, k: int) -> "SectorOperator":
        if k < 0:
            raise ValueError("negative operator power")
        out = self.space.identity()
        for _ in range(k):
            out = self @ out
        return out

    def restrict(self, max_source: int) -> "SectorOperator":
        """Keep only blocks acting on sectors ``N <= max_source``."""
        return SectorOperator(
            self.space,
            self.delta_n,
            {N: b for N, b in self.blocks.items() if N <= max_source},
        )

    def block(self, N: int) -> np.ndarray:
        try:
            return self.blocks[N]
        except KeyError:
            raise CapacityError(
                f"no exact block from sector {N} (delta_n={self.delta_n}, "
                f"nmax={self.space.nmax})"
            ) from None

    def apply(self, vec: np.ndarray, N: int) -> np.ndarray:
        """Act on a sector-``N`` vector; result lives in sector ``N + delta_n``."""
        return self.block(N) @ vec

    def max_abs(self, sectors=None) -> float:
        keys = self.blocks if sectors is None else sectors
        vals = [np.abs(self.blocks[N]).max() for N in keys if self.blocks[N].size]
        return max(vals, default=0.0)


ZERO_SCALE = 1e-12


def residual(lhs: SectorOperator, rhs: SectorOperator, scale: float = 0.0) -> float:
    """Max-abs difference over shared sectors, relative to the larger operand.

    ``scale`` raises the reference magnitude, e.g. to the size of the
    individual products when the right-hand side is zero.  Below
    ``ZERO_SCALE`` the absolute difference is returned.
    """
    lhs._same_space(rhs)
    if lhs.delta_n != rhs.delta_n:
        raise ValueError(f"delta_n mismatch: {lhs.delta_n} vs {rhs.delta_n}")
    common = sorted(lhs.blocks.keys() & rhs.blocks.keys())
    if not common:
        raise ValueError("operators share no exact sectors; comparison is vacuous")
    diff = max(
        (np.abs(lhs.blocks[N] - rhs.blocks[N]).max() for N in common if lhs.blocks[N].size),
        default=0.0,
    )
    ref = max(lhs.max_abs(common), rhs.max_abs(common), scale)
    return diff if ref < ZERO_SCALE else diff / ref
