"""Symbolic boxes in Z^n: products of intervals and periodic slab families.

A :class:`Box` with periodic axes stands for the infinite family of ordinary
boxes obtained by choosing one slab per periodic axis.  Distances use the
weighted l1 metric and are computed exactly, axis by axis.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from ..errors import ParseError


@dataclass(frozen=True)
class Interval:
    """``[lo, hi]`` with ``None`` standing for minus or plus infinity."""

    lo: Optional[int] = None
    hi: Optional[int] = None

    def __post_init__(self):
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo},{self.hi}]")

    @property
    def bounded(self) -> bool:
        return self.lo is not None and self.hi is not None

    @property
    def unbounded_both(self) -> bool:
        return self.lo is None and self.hi is None

    def length(self) -> Optional[int]:
        return self.hi - self.lo if self.bounded else None

    def contains(self, x: int) -> bool:
        return (self.lo is None or x >= self.lo) and (self.hi is None or x <= self.hi)

    def index(self, x: int):
        return () if self.contains(x) else None

    def __str__(self):
        lo = "(-inf" if self.lo is None else f"[{self.lo}"
        hi = "inf)" if self.hi is None else f"{self.hi}]"
        return f"{lo},{hi}"


@dataclass(frozen=True)
class Periodic:
    """Slabs ``[offset + k*period, offset + k*period + width - 1]`` for all integers ``k``,
    optionally clipped to ``[lo, hi]``."""

    offset: int
    width: int
    period: int
    lo: Optional[int] = None
    hi: Optional[int] = None

    def __post_init__(self):
        if self.width < 1 or self.period < self.width:
            raise ValueError(f"need 1 <= width <= period, got width {self.width}, period {self.period}")
        object.__setattr__(self, "offset", self.offset % self.period)

    bounded = True
    unbounded_both = False

    @property
    def clip(self) -> Interval:
        return Interval(self.lo, self.hi)

    def length(self) -> int:
        if self.lo is not None and self.hi is not None:
            return min(self.width, self.hi - self.lo + 1) - 1
        return self.width - 1

    def contains(self, x: int) -> bool:
        return self.clip.contains(x) and (x - self.offset) % self.period < self.width

    def index(self, x: int):
        """Which slab ``x`` lies in (``None`` when it lies in none)."""
        if not self.contains(x):
            return None
        return (x - self.offset) // self.period

    def residues(self) -> set:
        return {(self.offset + t) % self.period for t in range(self.width)}

    def __str__(self):
        out = f"[{self.offset},{self.offset + self.width - 1}]+{self.period}Z"
        if self.lo is not None or self.hi is not None:
            out += "&" + str(self.clip)
        return out


Axis = Union[Interval, Periodic]


def _interval_gap(a_lo, a_hi, b_lo, b_hi) -> int:
    """Coordinate gap between two intervals (``None`` = infinite end)."""
    if a_hi is not None and b_lo is not None and b_lo > a_hi:
        return b_lo - a_hi
    if b_hi is not None and a_lo is not None and a_lo > b_hi:
        return a_lo - b_hi
    return 0


def axis_gap(a: Axis, b: Axis) -> int:
    """Least coordinate gap between any slab of ``a`` and any slab of ``b``.

    Clipping of periodic axes is ignored; it only removes points, so the
    value is then a lower bound, which is the safe direction for checks.
    """
    if isinstance(a, Interval) and isinstance(b, Interval):
        return _interval_gap(a.lo, a.hi, b.lo, b.hi)
    if isinstance(a, Interval):
        a, b = b, a
    if isinstance(b, Interval):
        if not b.bounded:
            return 0
        # slabs of a near [b.lo, b.hi]
        best = None
        k0 = (b.lo - a.offset) // a.period
        for k in range(k0 - 1, k0 + 2 + (b.hi - b.lo) // a.period):
            s = a.offset + k * a.period
            g = _interval_gap(s, s + a.width - 1, b.lo, b.hi)
            best = g if best is None else min(best, g)
        return best
    # both periodic: start differences run over (b.offset - a.offset) + gcd * Z
    g = math.gcd(a.period, b.period)
    base = (b.offset - a.offset) % g
    # t = start_b - start_a; gap = max(0, t - (wa-1), -t - (wb-1))
    lo_t, hi_t = -(b.width - 1), a.width - 1
    first = lo_t + ((base - lo_t) % g)
    if first <= hi_t:
        return 0
    below = first - g
    return min(first - hi_t, lo_t - below)


def same_axis_gap(a: Axis) -> Optional[int]:
    """Least gap between two different slabs of one axis (``None`` if it has one slab)."""
    if isinstance(a, Periodic):
        return a.period - a.width + 1
    return None


@dataclass(frozen=True)
class Box:
    """Product of axes; each choice of slabs on the periodic axes is one box."""

    axes: Tuple[Axis, ...]
    weights: Tuple[int, ...] = ()

    def __post_init__(self):
        if not self.weights:
            object.__setattr__(self, "weights", (1,) * len(self.axes))
        if len(self.weights) != len(self.axes):
            raise ValueError("one weight per axis")

    @classmethod
    def full(cls, n: int, weights: Optional[Sequence[int]] = None) -> "Box":
        return cls(tuple(Interval() for _ in range(n)), tuple(weights or (1,) * n))

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def bounded(self) -> bool:
        return all(a.bounded for a in self.axes)

    @property
    def periodic_axes(self) -> List[int]:
        return [j for j, a in enumerate(self.axes) if isinstance(a, Periodic)]

    def diameter(self) -> Optional[int]:
        """Largest l1 diameter of a member box, ``None`` if unbounded."""
        if not self.bounded:
            return None
        return sum(w * a.length() for w, a in zip(self.weights, self.axes))

    def replace(self, j: int, axis: Axis) -> "Box":
        axes = list(self.axes)
        axes[j] = axis
        return Box(tuple(axes), self.weights)

    def piece_of(self, p: Sequence[int]):
        """Index of the member box containing ``p`` (``None`` if none does)."""
        key = []
        for a, x in zip(self.axes, p):
            i = a.index(x)
            if i is None:
                return None
            if isinstance(a, Periodic):
                key.append(i)
        return tuple(key)

    def contains(self, p: Sequence[int]) -> bool:
        return self.piece_of(p) is not None

    def points(self) -> Iterator[tuple]:
        if not self.bounded or self.periodic_axes:
            raise ValueError("only a single bounded box can be enumerated")
        ranges = [range(a.lo, a.hi + 1) for a in self.axes]
        out = [()]
        for r in ranges:
            out = [p + (x,) for p in out for x in r]
        return iter(out)

    def __str__(self):
        return f"Z^{self.dim} box " + "x".join(str(a) for a in self.axes)


def box_distance(a: Box, b: Box) -> int:
    """Least l1 distance between a member of ``a`` and a member of ``b``."""
    return sum(w * axis_gap(x, y) for w, x, y in zip(a.weights, a.axes, b.axes))


def self_distance(a: Box, axes: Optional[Sequence[int]] = None) -> Optional[int]:
    """Least l1 distance between two members of ``a`` that differ only on ``axes``.

    Members differing on several periodic axes are farther apart than ones
    differing on a single axis, so the minimum changes one slab.  ``None``
    means there is only one member.
    """
    js = a.periodic_axes if axes is None else [j for j in axes if isinstance(a.axes[j], Periodic)]
    gaps = [a.weights[j] * same_axis_gap(a.axes[j]) for j in js]
    return min(gaps) if gaps else None


_INTERVAL = r"(?:\(-inf|\[-?\d+)\s*,\s*(?:inf\)|-?\d+\])"
_AXIS = re.compile(
    r"\s*(?P<iv>" + _INTERVAL + r")(?:\s*\+\s*(?P<p>\d+)Z(?:\s*&\s*(?P<clip>" + _INTERVAL + r"))?)?\s*")


def _parse_interval(text: str) -> Tuple[Optional[int], Optional[int]]:
    lo_s, hi_s = (t.strip() for t in text.split(","))
    lo = None if lo_s == "(-inf" else int(lo_s[1:])
    hi = None if hi_s == "inf)" else int(hi_s[:-1])
    return lo, hi
_HEAD = re.compile(r"\s*Z\^(?P<n>\d+)\s+box\s+")


def parse_box(text: str, weights: Optional[Sequence[int]] = None) -> Box:
    """Parse ``"Z^2 box [0,inf)x[-3,3]"``; periodic axes read ``[a,b]+PZ``."""
    m = _HEAD.match(text)
    if not m:
        raise ParseError("expected 'Z^n box ...'", text, 0)
    n = int(m.group("n"))
    pos = m.end()
    axes = []
    while True:
        am = _AXIS.match(text, pos)
        if not am:
            raise ParseError("expected an axis like [a,b], (-inf,b], [a,inf) or [a,b]+PZ", text, pos)
        lo, hi = _parse_interval(am.group("iv"))
        try:
            if am.group("p"):
                if lo is None or hi is None:
                    raise ParseError("periodic axes need finite ends", text, pos)
                clo, chi = _parse_interval(am.group("clip")) if am.group("clip") else (None, None)
                axes.append(Periodic(lo, hi - lo + 1, int(am.group("p")), clo, chi))
            else:
                axes.append(Interval(lo, hi))
        except ValueError as exc:
            raise ParseError(str(exc), text, pos) from None
        pos = am.end()
        if pos == len(text):
            break
        if text[pos] != "x":
            raise ParseError("expected 'x' between axes", text, pos)
        pos += 1
    if len(axes) != n:
        raise ParseError(f"declared Z^{n} but found {len(axes)} axes", text, 0)
    return Box(tuple(axes), tuple(weights) if weights else (1,) * n)
