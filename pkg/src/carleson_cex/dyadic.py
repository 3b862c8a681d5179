"""Dyadic intervals, arcs, and exact dyadic phases."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterator

from .errors import DomainError, PreconditionError

__all__ = ["DyadicInterval", "relative_distance", "turn_phase", "arcs_of_rank"]

_QUARTER_TURNS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def turn_phase(numerator: int, log2_denominator: int) -> complex:
    """Return ``exp(2 pi i * numerator / 2**log2_denominator)``.

    The fraction is reduced with exact integer arithmetic before any floating
    point work, so arbitrarily large numerators keep full accuracy.  Multiples
    of a quarter turn are returned as exact values.
    """
    if log2_denominator < 0:
        # integer numerator over a fractional power of two is a whole turn
        return 1.0 + 0.0j
    den = 1 << log2_denominator
    num = numerator % den
    if (num << 2) % den == 0:
        return _QUARTER_TURNS[(num << 2) // den]
    # use the representative in (-1/2, 1/2] for symmetric rounding
    if 2 * num > den:
        num -= den
    frac = num / den  # correctly rounded for arbitrary-size integers
    return cmath.exp(2j * math.pi * frac)


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """Dyadic interval ``[k 2^-j, (k+1) 2^-j)``.

    Parameters
    ----------
    rank : int
        ``j >= 0``.
    index : int
        ``k``; arcs of the circle use ``0 <= k < 2**j``, intervals of the
        line may use any integer.
    """

    rank: int
    index: int

    def __post_init__(self):
        if not isinstance(self.rank, int) or isinstance(self.rank, bool) or self.rank < 0:
            raise DomainError(f"rank must be a nonnegative integer, got {self.rank!r}")
        if not isinstance(self.index, int) or isinstance(self.index, bool):
            raise DomainError(f"index must be an integer, got {self.index!r}")

    @property
    def length(self) -> float:
        return math.ldexp(1.0, -self.rank)

    @property
    def left(self) -> float:
        return math.ldexp(float(self.index), -self.rank)

    @property
    def right(self) -> float:
        return math.ldexp(float(self.index + 1), -self.rank)

    @property
    def center(self) -> float:
        return math.ldexp(float(2 * self.index + 1), -self.rank - 1)

    @property
    def center_numerator(self) -> int:
        """``2k + 1``: the center is ``center_numerator / 2**(rank + 1)``."""
        return 2 * self.index + 1

    @property
    def is_arc(self) -> bool:
        """True when the interval is a dyadic arc of the unit circle ``[0, 1)``."""
        return 0 <= self.index < (1 << self.rank)

    def require_arc(self) -> "DyadicInterval":
        if not self.is_arc:
            raise DomainError(f"{self} is not a dyadic arc of [0, 1)")
        return self

    def children(self) -> tuple["DyadicInterval", "DyadicInterval"]:
        return (DyadicInterval(self.rank + 1, 2 * self.index),
                DyadicInterval(self.rank + 1, 2 * self.index + 1))

    def parent(self) -> "DyadicInterval":
        if self.rank == 0:
            raise DomainError("rank-0 interval has no dyadic parent")
        return DyadicInterval(self.rank - 1, self.index >> 1)

    def ancestor(self, rank: int) -> "DyadicInterval":
        if rank > self.rank or rank < 0:
            raise DomainError("ancestor rank must lie in [0, rank]")
        return DyadicInterval(rank, self.index >> (self.rank - rank))

    def contains(self, other: "DyadicInterval") -> bool:
        return other.rank >= self.rank and (other.index >> (other.rank - self.rank)) == self.index

    def center_phase(self, frequency: int) -> complex:
        """``exp(2 pi i * frequency * C_I)`` computed exactly."""
        return turn_phase(frequency * self.center_numerator, self.rank + 1)

    def to_dict(self) -> dict:
        return {"j": self.rank, "k": self.index}

    def __str__(self) -> str:
        return f"D({self.rank},{self.index})"


def arcs_of_rank(rank: int) -> Iterator[DyadicInterval]:
    """All dyadic arcs of the circle with the given rank, in index order."""
    for k in range(1 << rank):
        yield DyadicInterval(rank, k)


def relative_distance(I: DyadicInterval, J: DyadicInterval) -> int:
    """Relative distance ``|n|`` where ``I`` lies in ``J + n|J|``.

    Parameters
    ----------
    I, J : DyadicInterval
        Intervals of the line with ``|I| <= |J|``.

    Raises
    ------
    PreconditionError
        If ``|I| > |J|``.
    """
    if I.rank < J.rank:
        raise PreconditionError("relative_distance requires |I| <= |J|")
    # floor(L_I / |J|) with exact integer arithmetic (>> floors negatives)
    shift = (I.index >> (I.rank - J.rank)) - J.index
    return abs(shift)
