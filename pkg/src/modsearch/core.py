"""Domain types shared across the package.

Symbols are non-negative integers. Vectors and tables are indexed by the
rank of a symbol in the alphabet, never by its raw value.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np


class ModSearchError(Exception):
    """Base class for all errors raised by this package."""


class NotInAlphabet(ModSearchError, KeyError):
    pass


class ScoreOutOfRange(ModSearchError, ValueError):
    pass


class EmptyClass(ModSearchError, ValueError):
    pass


class NotPowerOfTwo(ModSearchError, ValueError):
    pass


class InputFormatError(ModSearchError, ValueError):
    """Malformed input file or record. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(ModSearchError, OverflowError):
    """Instance would exceed the 63-bit accumulator budget."""


INT63_LIMIT = 2**63 - 1


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[int, ...]
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        syms = tuple(self.symbols)
        if any(s < 0 for s in syms):
            raise ValueError("alphabet symbols must be non-negative")
        if any(a >= b for a, b in zip(syms, syms[1:])):
            raise ValueError("alphabet symbols must be strictly increasing")
        object.__setattr__(self, "symbols", syms)
        object.__setattr__(self, "index", {s: i for i, s in enumerate(syms)})

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, c: int) -> bool:
        return c in self.index

    def rank(self, c: int) -> int:
        try:
            return self.index[c]
        except KeyError:
            raise NotInAlphabet(c) from None

    def ranks(self, chars: Sequence[int]) -> np.ndarray:
        values = np.asarray(chars, dtype=np.int64)
        symbols = np.asarray(self.symbols, dtype=np.int64)
        ranks = np.searchsorted(symbols, values)
        hit = ranks < len(symbols)
        hit[hit] = symbols[ranks[hit]] == values[hit]
        if not hit.all():
            raise NotInAlphabet(int(values[~hit][0]))
        return ranks.astype(np.int64)


@dataclass(frozen=True)
class CharacterClass:
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(self.members)))
        if not members:
            raise EmptyClass("character class must be nonempty")
        if members[0] < 0:
            raise ValueError("class members must be non-negative")
        object.__setattr__(self, "members", members)

    def __contains__(self, c: int) -> bool:
        i = bisect_left(self.members, c)
        return i < len(self.members) and self.members[i] == c

    def __len__(self) -> int:
        return len(self.members)

    def nearest_distance(self, c: int) -> int:
        """Distance from ``c`` to the closest member, by binary search."""
        ms = self.members
        i = bisect_left(ms, c)
        best = None
        if i < len(ms):
            best = ms[i] - c
        if i > 0:
            d = c - ms[i - 1]
            if best is None or d < best:
                best = d
        return best


@dataclass(frozen=True)
class PatternPosition:
    cls: CharacterClass
    local_bound: Optional[int] = None

    def __post_init__(self):
        if self.local_bound is not None and self.local_bound < 0:
            raise ValueError("local bound must be non-negative")


# An omega symbol: (class, effective bound). The bound is None when neither a
# private nor a global bound applies.
OmegaSymbol = tuple[CharacterClass, Optional[int]]


@dataclass(frozen=True)
class Pattern:
    """Ordered pattern positions plus the distinct symbol set they induce.

    ``omega`` lists each distinct (class, effective bound) pair once, in order
    of first occurrence; ``omega_of[i]`` is the symbol index of position ``i``
    (0-based). Private bounds override ``default_bound`` before enumeration.
    """

    positions: tuple[PatternPosition, ...]
    default_bound: Optional[int] = None
    omega: tuple[OmegaSymbol, ...] = field(init=False)
    omega_of: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        positions = tuple(self.positions)
        if not positions:
            raise ValueError("pattern must have at least one position")
        seen: dict = {}
        omega_of = []
        for pos in positions:
            key = (pos.cls, self.bound_for(pos))
            if key not in seen:
                seen[key] = len(seen)
            omega_of.append(seen[key])
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "omega", tuple(seen))
        object.__setattr__(self, "omega_of", tuple(omega_of))

    @classmethod
    def from_raw(cls, raw: Iterable, default_bound: Optional[int] = None) -> "Pattern":
        """Build from ``[(members, bound_or_None), ...]`` or bare member lists."""
        positions = []
        for item in raw:
            if isinstance(item, PatternPosition):
                positions.append(item)
            elif _is_pair(item):
                members, bound = item
                positions.append(PatternPosition(_as_class(members), bound))
            else:
                positions.append(PatternPosition(_as_class(item)))
        return cls(tuple(positions), default_bound)

    def bound_for(self, pos: PatternPosition) -> Optional[int]:
        return pos.local_bound if pos.local_bound is not None else self.default_bound

    @property
    def m(self) -> int:
        return len(self.positions)

    def __len__(self) -> int:
        return len(self.positions)

    def effective_bound(self, i: int) -> Optional[int]:
        return self.bound_for(self.positions[i])

    def with_default_bound(self, default_bound: Optional[int]) -> "Pattern":
        if default_bound == self.default_bound:
            return self
        return Pattern(self.positions, default_bound)

    @property
    def all_bounded(self) -> bool:
        return all(p.local_bound is not None for p in self.positions)


def _is_pair(item) -> bool:
    if isinstance(item, CharacterClass) or len(item) != 2:
        return False
    members, bound = item
    return not isinstance(members, int) and (bound is None or isinstance(bound, int))


def _as_class(members) -> CharacterClass:
    return members if isinstance(members, CharacterClass) else CharacterClass(tuple(members))


@dataclass(frozen=True)
class Text:
    chars: tuple[int, ...]

    def __post_init__(self):
        chars = tuple(int(c) for c in self.chars)
        if any(c < 0 for c in chars):
            raise ValueError("text characters must be non-negative")
        object.__setattr__(self, "chars", chars)

    @property
    def n(self) -> int:
        return len(self.chars)

    def __len__(self) -> int:
        return len(self.chars)


@dataclass(frozen=True)
class MatchReport:
    position: int  # 1-based alignment start
    score: int
    verdict: bool


def build_alphabet(text: Iterable[int], classes: Iterable[Iterable[int]]) -> Alphabet:
    """Sorted union of the text characters and all class members."""
    symbols = set(int(c) for c in text)
    for cls in classes:
        if isinstance(cls, PatternPosition):
            cls = cls.cls
        if isinstance(cls, CharacterClass):
            cls = cls.members
        symbols.update(int(c) for c in cls)
    if any(s < 0 for s in symbols):
        raise ValueError("symbols must be non-negative")
    return Alphabet(tuple(sorted(symbols)))


def char_vector(c: int, alphabet: Alphabet) -> np.ndarray:
    v = np.zeros(len(alphabet), dtype=np.int64)
    v[alphabet.rank(c)] = 1
    return v


def omega_vector(i: int, pattern: Pattern) -> np.ndarray:
    """Indicator of the omega symbol of 1-based position ``i``."""
    if not 1 <= i <= pattern.m:
        raise IndexError(f"position {i} outside 1..{pattern.m}")
    v = np.zeros(len(pattern.omega), dtype=np.int64)
    v[pattern.omega_of[i - 1]] = 1
    return v


def mismatches_from_score(v: int, m: int) -> int:
    if v < 0 or v > m:
        raise ScoreOutOfRange(f"score {v} outside 0..{m}")
    return m - v
