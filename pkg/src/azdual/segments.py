"""Exact half-integer arithmetic, supercuspidal lines, and segment primitives.

Every numeric quantity in this package lives in (1/2)Z and is stored exactly
as twice its value, so grid membership is a parity condition on plain ints
and no floats ever appear.
"""
from __future__ import annotations

import re
from dataclasses import dataclass


class DomainError(ValueError):
    """Invalid input: bad data, incompatible lines, or a failed precondition."""


class InvariantError(RuntimeError):
    """Internal consistency check failed.  Valid inputs must never raise this."""


_HALF_RE = re.compile(r"^([+-]?\d+)(?:/2)?$")


class HalfInt:
    """A value in (1/2)Z, stored as ``twice`` (an int equal to twice the value).

    Immutable and hashable.  Construct from an int value, from another
    HalfInt, via :meth:`from_twice`, or via :meth:`parse` ("3", "-5/2").
    """

    __slots__ = ("twice",)

    def __init__(self, value: "int | HalfInt" = 0):
        if isinstance(value, HalfInt):
            t = value.twice
        elif isinstance(value, int):
            t = 2 * value
        else:
            raise TypeError(f"cannot build HalfInt from {type(value).__name__}")
        object.__setattr__(self, "twice", t)

    @classmethod
    def from_twice(cls, twice: int) -> "HalfInt":
        h = _HALF_CACHE.get(twice)
        if h is not None:
            return h
        h = cls.__new__(cls)
        object.__setattr__(h, "twice", int(twice))
        return h

    @classmethod
    def parse(cls, text: str) -> "HalfInt":
        m = _HALF_RE.match(text.strip())
        if not m:
            raise DomainError(f"not a half-integer: {text!r}")
        n = int(m.group(1))
        return cls.from_twice(n if text.strip().endswith("/2") else 2 * n)

    def __setattr__(self, name, value):
        raise AttributeError("HalfInt is immutable")

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _twice_of(other) -> int:
        if isinstance(other, HalfInt):
            return other.twice
        if isinstance(other, int):
            return 2 * other
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is NotImplemented else HalfInt.from_twice(self.twice + t)

    __radd__ = __add__

    def __sub__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is NotImplemented else HalfInt.from_twice(self.twice - t)

    def __rsub__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is NotImplemented else HalfInt.from_twice(t - self.twice)

    def __neg__(self):
        return HalfInt.from_twice(-self.twice)

    def __abs__(self):
        return HalfInt.from_twice(abs(self.twice))

    def __mul__(self, other):
        if isinstance(other, int):
            return HalfInt.from_twice(self.twice * other)
        return NotImplemented

    __rmul__ = __mul__

    # -- comparisons --------------------------------------------------------

    def __eq__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is NotImplemented else self.twice == t

    def __lt__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is NotImplemented else self.twice < t

    def __le__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is NotImplemented else self.twice <= t

    def __gt__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is NotImplemented else self.twice > t

    def __ge__(self, other):
        t = self._twice_of(other)
        return NotImplemented if t is NotImplemented else self.twice >= t

    def __hash__(self):
        return hash(self.twice) ^ 0x5A5A

    def __bool__(self):
        return self.twice != 0

    # -- misc ---------------------------------------------------------------

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def as_int(self) -> int:
        if self.twice % 2:
            raise DomainError(f"{self} is not an integer")
        return self.twice // 2

    def __str__(self) -> str:
        return str(self.twice // 2) if self.twice % 2 == 0 else f"{self.twice}/2"

    __repr__ = __str__


_HALF_CACHE: "dict[int, HalfInt]" = {}
for _t in range(-128, 129):
    _h = HalfInt.__new__(HalfInt)
    object.__setattr__(_h, "twice", _t)
    _HALF_CACHE[_t] = _h
del _t, _h


def half(value) -> HalfInt:
    """Coerce an int, string ("3", "-1/2"), or HalfInt to a HalfInt."""
    if isinstance(value, HalfInt):
        return value
    if isinstance(value, int):
        return HalfInt(value)
    if isinstance(value, str):
        return HalfInt.parse(value)
    raise TypeError(f"cannot coerce {type(value).__name__} to HalfInt")


# ---------------------------------------------------------------------------
# Supercuspidal lines
# ---------------------------------------------------------------------------

GOOD = "good"
BAD = "bad"
UGLY = "ugly"
LINE_CLASSES = (GOOD, BAD, UGLY)

GRID_INT = "integral"
GRID_HALF = "half-integral"
GRIDS = (GRID_INT, GRID_HALF)


@dataclass(frozen=True, order=True)
class Line:
    """A supercuspidal line: identifier, arithmetic class, coefficient grid.

    ``cls`` is one of good / bad / ugly.  Ugly lines are stored in their
    normalized integral-grid form and segments on them carry a ``side``
    flag (0 for the line itself, 1 for its contragredient partner).
    """

    id: str
    cls: str
    grid: str

    def __post_init__(self):
        if not self.id or not isinstance(self.id, str):
            raise DomainError(f"line id must be a nonempty string, got {self.id!r}")
        if self.cls not in LINE_CLASSES:
            raise DomainError(f"unknown line class {self.cls!r}")
        if self.grid not in GRIDS:
            raise DomainError(f"unknown grid {self.grid!r}")
        if self.cls == UGLY and self.grid != GRID_INT:
            raise DomainError("ugly lines are normalized to the integral grid")

    @property
    def same_type_as_g(self):
        """True for good+integral and bad+half-integral; None for ugly lines."""
        if self.cls == UGLY:
            return None
        return (self.grid == GRID_INT) == (self.cls == GOOD)

    def grid_ok(self, h: HalfInt) -> bool:
        return h.twice % 2 == (0 if self.grid == GRID_INT else 1)


def line(id: str, cls: str = GOOD, grid: str = GRID_INT) -> Line:
    return Line(id, cls, grid)


# ---------------------------------------------------------------------------
# Segments
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Segment:
    """A segment [b, e] on a line, possibly empty (e == b - 1).

    ``side`` is None on good/bad lines; on ugly lines it is 0 or 1 and
    records which member of the contragredient pair carries the segment.
    """

    line: Line
    b: HalfInt
    e: HalfInt
    side: "int | None" = None

    def __post_init__(self):
        if not isinstance(self.b, HalfInt) or not isinstance(self.e, HalfInt):
            raise TypeError("segment endpoints must be HalfInt")
        if not self.line.grid_ok(self.b) or not self.line.grid_ok(self.e):
            raise DomainError(
                f"endpoints [{self.b},{self.e}] off the {self.line.grid} grid of {self.line.id}"
            )
        if self.e.twice < self.b.twice - 2:
            raise DomainError(f"degenerate segment [{self.b},{self.e}]")
        if self.line.cls == UGLY:
            if self.side not in (0, 1):
                raise DomainError("segments on ugly lines need side 0 or 1")
        elif self.side is not None:
            raise DomainError("side flag is only meaningful on ugly lines")
        ident = (
            self.line.id, self.line.cls, self.line.grid,
            self.b.twice, self.e.twice, self.side,
        )
        object.__setattr__(self, "_ident", ident)
        object.__setattr__(self, "_hash", hash(ident))

    def __eq__(self, other):
        return isinstance(other, Segment) and self._ident == other._ident

    def __hash__(self):
        return self._hash

    @property
    def c(self) -> HalfInt:
        return HalfInt.from_twice((self.b.twice + self.e.twice) // 2)

    @property
    def length(self) -> int:
        return (self.e.twice - self.b.twice) // 2 + 1

    @property
    def is_empty(self) -> bool:
        return self.length == 0

    @property
    def is_centered(self) -> bool:
        return self.b.twice + self.e.twice == 0 and not self.is_empty

    def key(self):
        """The GL line this segment lives on: (line, side)."""
        return (self.line, self.side)

    def __str__(self) -> str:
        tail = "~" if self.side == 1 else ""
        return f"[{self.b},{self.e}]@{self.line.id}{tail}"

    __repr__ = __str__


def seg(ln: Line, b, e, side: "int | None" = None) -> Segment:
    """Convenience constructor coercing endpoint types."""
    return Segment(ln, half(b), half(e), side)


def seg_props(d: Segment):
    """(beginning, end, center, length) of a segment, empty ones included."""
    return (d.b, d.e, d.c, d.length)


_SEG_CACHE: dict = {}


def _cached_segment(ln: Line, b2: int, e2: int, side) -> Segment:
    """Validated construction with interning; inputs must be on-grid."""
    key = (ln.id, ln.cls, ln.grid, b2, e2, side)
    d = _SEG_CACHE.get(key)
    if d is None:
        d = Segment(ln, HalfInt.from_twice(b2), HalfInt.from_twice(e2), side)
        _SEG_CACHE[key] = d
    return d


def seg_dual(d: Segment) -> Segment:
    """The contragredient segment [-e, -b]; flips the side on ugly lines."""
    side = d.side if d.side is None else 1 - d.side
    return _cached_segment(d.line, -d.e.twice, -d.b.twice, side)


_TRUNC_MODES = ("end", "begin", "both", "end2", "begin2")


def seg_trunc(d: Segment, mode: str) -> Segment:
    """Shorten a nonempty segment; results may be empty (flagged, not an error).

    Modes: "end" drops the last coefficient, "begin" the first, "both" one
    from each side, "end2"/"begin2" drop two from one side.
    """
    if d.is_empty:
        raise DomainError(f"cannot truncate empty segment {d}")
    if mode not in _TRUNC_MODES:
        raise DomainError(f"unknown truncation mode {mode!r}")
    b2, e2 = d.b.twice, d.e.twice
    if mode == "end":
        e2 -= 2
    elif mode == "end2":
        e2 -= 4
    elif mode == "begin":
        b2 += 2
    elif mode == "begin2":
        b2 += 4
    else:
        b2 += 2
        e2 -= 2
    if mode.startswith("end"):
        e2 = max(e2, b2 - 2)
    elif mode.startswith("begin"):
        b2 = min(b2, e2 + 2)
    else:
        e2 = max(e2, b2 - 2)
    return _cached_segment(d.line, b2, e2, d.side)


def _same_gl_line(d1: Segment, d2: Segment, op: str):
    if d1.line != d2.line or d1.side != d2.side:
        raise DomainError(f"{op}: segments on different lines ({d1} vs {d2})")


def seg_lt(d1: Segment, d2: Segment) -> bool:
    """Strict algorithmic order: earlier beginning wins, ties broken by the
    later end being *smaller*.  Total on each line; irreflexive."""
    _same_gl_line(d1, d2, "seg_lt")
    if d1.b.twice != d2.b.twice:
        return d1.b.twice < d2.b.twice
    return d1.e.twice > d2.e.twice


def seg_le(d1: Segment, d2: Segment) -> bool:
    return d1 == d2 or seg_lt(d1, d2)


def seg_precedes(d1: Segment, d2: Segment) -> bool:
    """Classical juxtaposition order: d1 and d2 are linked with d1 shifted down.

    Holds iff b1 < b2, e1 < e2 and the union is again a segment.
    """
    _same_gl_line(d1, d2, "seg_precedes")
    if d1.is_empty or d2.is_empty:
        raise DomainError("seg_precedes needs nonempty segments")
    return (
        d1.b.twice < d2.b.twice
        and d1.e.twice < d2.e.twice
        and d2.b.twice <= d1.e.twice + 2
    )


def seg_contains(d1: Segment, d2: Segment) -> bool:
    """Whether d1 contains the nonempty segment d2."""
    _same_gl_line(d1, d2, "seg_contains")
    if d2.is_empty:
        raise DomainError("containment of an empty segment is not defined here")
    return d1.b.twice <= d2.b.twice and d2.e.twice <= d1.e.twice


def seg_sort_key(d: Segment):
    """Canonical descending storage key (used by multiset containers)."""
    return (d.line.id, d.side if d.side is not None else -1, -d.b.twice, d.e.twice)
