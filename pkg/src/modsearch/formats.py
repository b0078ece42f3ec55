"""Text, pattern and assignment-table file formats.

Text: decimal non-negative integers separated by any whitespace.
Pattern: one position per line, ``3,5,7`` or ``3,5,7@2`` with a private
bound; blank lines and ``#`` comments are ignored.
Table: ``char,class_index,score`` records (see
:func:`modsearch.scoring.parse_assignment_table`).
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping, Union

from .core import CharacterClass, InputFormatError, Pattern, PatternPosition, Text
from .scoring import parse_assignment_table

__all__ = [
    "parse_text",
    "parse_pattern",
    "parse_assignment_table",
    "read_text",
    "read_pattern",
    "format_text",
    "format_pattern",
    "format_table",
]

PathLike = Union[str, Path]


def _nonneg_int(token: str, line: int, what: str) -> int:
    token = token.strip()
    if not token.isdigit():
        raise InputFormatError(f"bad {what} {token!r}", line)
    return int(token)


def parse_text(data: str) -> Text:
    chars = []
    for lineno, line in enumerate(data.splitlines(), 1):
        for token in line.split():
            chars.append(_nonneg_int(token, lineno, "text character"))
    return Text(tuple(chars))


def parse_pattern(lines: Iterable[str], default_bound=None) -> Pattern:
    positions = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        body, sep, bound_str = line.partition("@")
        bound = _nonneg_int(bound_str, lineno, "local bound") if sep else None
        members = [_nonneg_int(tok, lineno, "class member") for tok in body.split(",")]
        positions.append(PatternPosition(CharacterClass(tuple(members)), bound))
    if not positions:
        raise InputFormatError("pattern has no positions")
    return Pattern(tuple(positions), default_bound)


def read_text(path: PathLike) -> Text:
    return parse_text(Path(path).read_text(encoding="utf-8"))


def read_pattern(path: PathLike, default_bound=None) -> Pattern:
    return parse_pattern(Path(path).read_text(encoding="utf-8").splitlines(), default_bound)


def format_text(text: Text, per_line: int = 32) -> str:
    chars = [str(c) for c in text.chars]
    rows = [" ".join(chars[i : i + per_line]) for i in range(0, len(chars), per_line)]
    return "\n".join(rows) + "\n"


def format_pattern(pattern: Pattern) -> str:
    out = []
    for pos in pattern.positions:
        line = ",".join(str(c) for c in pos.cls.members)
        if pos.local_bound is not None:
            line += f"@{pos.local_bound}"
        out.append(line)
    return "\n".join(out) + "\n"


def format_table(table: Mapping[tuple[int, int], int]) -> str:
    lines = [f"{c},{k},{score}" for (c, k), score in sorted(table.items())]
    return "\n".join(lines) + "\n"
