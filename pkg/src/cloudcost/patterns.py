"""Usage-pattern DSL: parsing and calendar evaluation of time-varying resource quantities.

A resource quantity is a baseline plus an ordered list of modification rules
written as comma-separated clauses::

    perm: every month +10, temp: every jun-aug on weekends /2, temp: every dec on 25-30 *2

``perm`` rules evolve the baseline cumulatively, once per matching month;
``temp`` rules apply transiently to individual days of matching months.
"""

from __future__ import annotations

import calendar
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

__all__ = [
    "YearMonth",
    "MonthWindow",
    "Mode",
    "DayScope",
    "DayRule",
    "Pattern",
    "UsageSpec",
    "Aggregation",
    "PatternSyntaxError",
    "SimulationError",
    "parse_patterns",
    "patterns_to_text",
    "effective_baseline",
    "daily_series",
    "month_quantity",
    "MONTH_NAMES",
    "WEEKDAY_NAMES",
]

MONTH_NAMES = ("jan", "feb", "mar", "apr", "may", "jun",
               "jul", "aug", "sep", "oct", "nov", "dec")
WEEKDAY_NAMES = ("mon", "tue", "wed", "thu", "fri", "sat", "sun")

ALL_MONTHS = frozenset(range(1, 13))

_YM_RE = re.compile(r"^(\d{4})-(\d{2})$")
_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


@dataclass(frozen=True, order=True)
class YearMonth:
    """A calendar month, e.g. 2010-09."""

    year: int
    month: int

    def __post_init__(self) -> None:
        if not 1 <= self.month <= 12:
            raise ValueError(f"month out of range: {self.month}")

    @classmethod
    def parse(cls, text: str) -> "YearMonth":
        m = _YM_RE.match(text.strip())
        if not m:
            raise ValueError(f"expected YYYY-MM, got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    @property
    def index(self) -> int:
        return self.year * 12 + (self.month - 1)

    @classmethod
    def from_index(cls, idx: int) -> "YearMonth":
        return cls(idx // 12, idx % 12 + 1)

    def plus(self, months: int) -> "YearMonth":
        return YearMonth.from_index(self.index + months)

    def months_since(self, other: "YearMonth") -> int:
        return self.index - other.index

    @property
    def days(self) -> int:
        return calendar.monthrange(self.year, self.month)[1]

    def weekday(self, day: int) -> int:
        """ISO weekday (1=Mon .. 7=Sun) of a day in this month."""
        return calendar.weekday(self.year, self.month, day) + 1

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


@dataclass(frozen=True)
class MonthWindow:
    """Inclusive range of simulated months."""

    start: YearMonth
    end: YearMonth

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"window start {self.start} after end {self.end}")

    def __len__(self) -> int:
        return self.end.index - self.start.index + 1

    def __iter__(self) -> Iterator[YearMonth]:
        for idx in range(self.start.index, self.end.index + 1):
            yield YearMonth.from_index(idx)

    def __contains__(self, ym: YearMonth) -> bool:
        return self.start <= ym <= self.end


class Mode(str, Enum):
    TEMP = "temp"
    PERM = "perm"


class DayScope(str, Enum):
    DEFAULT = "default"      # no "on" part: every day
    EVERYDAY = "everyday"
    WEEKDAYS = "weekdays"
    WEEKENDS = "weekends"
    DAY_RANGE = "day-range"  # calendar days lo..hi (1..30)
    WEEKDAY = "weekday"      # a single named weekday


class Aggregation(str, Enum):
    AVERAGE = "average"
    SUM_OF_DAILY = "sum-of-daily"
    POINT = "point"


@dataclass(frozen=True)
class DayRule:
    scope: DayScope = DayScope.DEFAULT
    lo: int = 0
    hi: int = 0
    weekday: int = 0  # ISO 1..7 when scope is WEEKDAY

    def matches(self, month: YearMonth, day: int) -> bool:
        if self.scope in (DayScope.DEFAULT, DayScope.EVERYDAY):
            return True
        if self.scope == DayScope.WEEKDAYS:
            return month.weekday(day) <= 5
        if self.scope == DayScope.WEEKENDS:
            return month.weekday(day) >= 6
        if self.scope == DayScope.DAY_RANGE:
            # days past the month's length simply never match
            return self.lo <= day <= self.hi
        return month.weekday(day) == self.weekday

    def to_text(self) -> str:
        if self.scope == DayScope.DEFAULT:
            return ""
        if self.scope == DayScope.DAY_RANGE:
            if self.lo == self.hi:
                return f"on {self.lo:02d}"
            return f"on {self.lo:02d}-{self.hi:02d}"
        if self.scope == DayScope.WEEKDAY:
            return f"on {WEEKDAY_NAMES[self.weekday - 1]}"
        return f"on {self.scope.value}"


@dataclass(frozen=True)
class Pattern:
    """One parsed clause of the usage grammar."""

    mode: Mode
    months: frozenset[int]
    days: DayRule
    op: str
    value: float

    def matches_month(self, month: YearMonth) -> bool:
        return month.month in self.months

    def to_text(self) -> str:
        on = self.days.to_text()
        months = months_to_text(self.months)
        parts = [f"{self.mode.value}: every {months}"]
        if on:
            parts.append(on)
        value = f"{self.value:g}"
        parts.append(f"{self.op}{value}")
        return " ".join(parts)


@dataclass(frozen=True)
class UsageSpec:
    """Baseline quantity plus its modification patterns."""

    baseline: float = 0.0
    patterns: tuple[Pattern, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.baseline < 0:
            raise ValueError(f"baseline must be >= 0, got {self.baseline}")

    @property
    def is_zero(self) -> bool:
        return self.baseline == 0 and not self.patterns

    def to_text(self) -> str:
        return patterns_to_text(self.patterns)


class PatternSyntaxError(ValueError):
    """Raised on malformed pattern text; carries the character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SimulationError(RuntimeError):
    """Raised when evaluation produces a non-finite or undefined quantity."""


def months_to_text(months: frozenset[int]) -> str:
    if months == ALL_MONTHS:
        return "month"
    ordered = sorted(months)
    runs = _contiguous_runs(ordered)
    if len(runs) == 1:
        lo, hi = runs[0]
        if lo == hi:
            return MONTH_NAMES[lo - 1]
        return f"{MONTH_NAMES[lo - 1]}-{MONTH_NAMES[hi - 1]}"
    # wrap-around range, e.g. nov-feb
    if len(runs) == 2 and runs[0][0] == 1 and runs[1][1] == 12:
        return f"{MONTH_NAMES[runs[1][0] - 1]}-{MONTH_NAMES[runs[0][1] - 1]}"
    raise ValueError(f"month set {sorted(months)} is not expressible as one clause")


def _contiguous_runs(ordered: Sequence[int]) -> list[tuple[int, int]]:
    runs: list[tuple[int, int]] = []
    for m in ordered:
        if runs and m == runs[-1][1] + 1:
            runs[-1] = (runs[-1][0], m)
        else:
            runs.append((m, m))
    return runs


def patterns_to_text(patterns: Sequence[Pattern]) -> str:
    return ", ".join(p.to_text() for p in patterns)


# --- parsing ---------------------------------------------------------------

_OPS = "+-*/^"


def parse_patterns(text: str) -> list[Pattern]:
    """Parse comma-separated pattern clauses, preserving textual order.

    Keywords are case-insensitive and whitespace between tokens is ignored.
    Raises PatternSyntaxError with a character position on malformed input.
    """
    patterns: list[Pattern] = []
    if not text or not text.strip():
        return patterns
    offset = 0
    for clause in text.split(","):
        stripped = clause.strip()
        if stripped:
            patterns.append(_parse_clause(stripped, offset + clause.index(stripped[0])))
        offset += len(clause) + 1
    return patterns


def _parse_clause(clause: str, base: int) -> Pattern:
    head, sep, rest = clause.partition(":")
    if not sep:
        raise PatternSyntaxError("expected 'temp:' or 'perm:' mode prefix", base)
    mode_word = head.strip().lower()
    if mode_word not in ("temp", "perm"):
        raise PatternSyntaxError(f"unknown mode {mode_word!r}", base)
    mode = Mode(mode_word)

    tokens = _tokenize(rest, base + len(head) + 1)
    pos = 0

    def peek() -> tuple[str, int]:
        if pos >= len(tokens):
            raise PatternSyntaxError("unexpected end of clause", base + len(clause))
        return tokens[pos]

    word, at = peek()
    if word.lower() != "every":
        raise PatternSyntaxError(f"expected 'every', got {word!r}", at)
    pos += 1

    word, at = peek()
    months = _parse_months(word.lower(), at)
    pos += 1

    days = DayRule()
    if pos < len(tokens) and tokens[pos][0].lower() == "on":
        pos += 1
        word, at = peek()
        days = _parse_days(word.lower(), at)
        pos += 1
        if mode == Mode.PERM:
            raise PatternSyntaxError("perm pattern cannot carry a day scope", at)

    if pos >= len(tokens):
        raise PatternSyntaxError("missing operator and value", base + len(clause))
    op_text = "".join(t for t, _ in tokens[pos:])
    op_at = tokens[pos][1]
    op, value = _parse_variation(op_text, op_at)
    return Pattern(mode=mode, months=months, days=days, op=op, value=value)


def _tokenize(text: str, base: int) -> list[tuple[str, int]]:
    tokens = []
    for m in re.finditer(r"\S+", text):
        tokens.append((m.group(), base + m.start()))
    return tokens


def _parse_months(word: str, at: int) -> frozenset[int]:
    if word == "month":
        return ALL_MONTHS
    if "-" in word:
        lo_name, _, hi_name = word.partition("-")
        lo = _month_number(lo_name, at)
        hi = _month_number(hi_name, at)
        if lo <= hi:
            return frozenset(range(lo, hi + 1))
        # wrap-around range, e.g. nov-feb
        return frozenset(range(lo, 13)) | frozenset(range(1, hi + 1))
    return frozenset({_month_number(word, at)})


def _month_number(name: str, at: int) -> int:
    try:
        return MONTH_NAMES.index(name) + 1
    except ValueError:
        raise PatternSyntaxError(f"unknown month token {name!r}", at) from None


def _parse_days(word: str, at: int) -> DayRule:
    if word == "everyday":
        return DayRule(DayScope.EVERYDAY)
    if word == "weekdays":
        return DayRule(DayScope.WEEKDAYS)
    if word == "weekends":
        return DayRule(DayScope.WEEKENDS)
    if word in WEEKDAY_NAMES:
        return DayRule(DayScope.WEEKDAY, weekday=WEEKDAY_NAMES.index(word) + 1)
    if re.fullmatch(r"\d{1,2}(-\d{1,2})?", word):
        lo_text, _, hi_text = word.partition("-")
        lo = int(lo_text)
        hi = int(hi_text) if hi_text else lo
        if not (1 <= lo <= 30 and 1 <= hi <= 30):
            raise PatternSyntaxError(f"day numbers must be 01-30, got {word!r}", at)
        if lo > hi:
            raise PatternSyntaxError(f"day range out of order: {word!r}", at)
        return DayRule(DayScope.DAY_RANGE, lo=lo, hi=hi)
    raise PatternSyntaxError(f"unknown day token {word!r}", at)


def _parse_variation(text: str, at: int) -> tuple[str, float]:
    if not text:
        raise PatternSyntaxError("missing operator and value", at)
    op = text[0]
    if op not in _OPS:
        raise PatternSyntaxError(f"missing operator (one of {_OPS}) before {text!r}", at)
    number = text[1:]
    if not number:
        raise PatternSyntaxError("missing value after operator", at)
    if not _NUMBER_RE.match(number):
        raise PatternSyntaxError(f"non-numeric value {number!r}", at)
    value = float(number)
    if op == "/" and value == 0:
        raise PatternSyntaxError("division by zero", at)
    return op, value


# --- evaluation ------------------------------------------------------------

def _apply(current: float, op: str, value: float) -> float:
    if op == "+":
        result = current + value
    elif op == "-":
        result = current - value
    elif op == "*":
        result = current * value
    elif op == "/":
        result = current / value
    else:  # "^"
        if current == 0 and value < 0:
            raise SimulationError("cannot raise zero usage to a negative power")
        if current < 0:  # unreachable: clamping keeps usage >= 0
            raise SimulationError("cannot exponentiate negative usage")
        result = current ** value
    if math.isnan(result) or math.isinf(result):
        raise SimulationError(f"usage overflow applying {op}{value:g}")
    # negative resource consumption is meaningless; clamp immediately
    return max(result, 0.0)


def effective_baseline(spec: UsageSpec, window_start: YearMonth, month: YearMonth) -> float:
    """Baseline after every perm pattern has fired once per matching month
    strictly before `month`. The first simulated month sees the raw baseline.
    """
    if month < window_start:
        raise ValueError(f"month {month} precedes window start {window_start}")
    value = spec.baseline
    perms = [p for p in spec.patterns if p.mode == Mode.PERM]
    if not perms:
        return value
    for idx in range(window_start.index, month.index):
        ym = YearMonth.from_index(idx)
        for p in perms:
            if p.matches_month(ym):
                value = _apply(value, p.op, p.value)
    return value


def daily_series(spec: UsageSpec, window_start: YearMonth, month: YearMonth) -> list[float]:
    """Per-day values for one month: each day starts at the perm-evolved
    baseline, then matching temp patterns apply in declaration order.
    """
    base = effective_baseline(spec, window_start, month)
    temps = [p for p in spec.patterns
             if p.mode == Mode.TEMP and p.matches_month(month)]
    series = []
    for day in range(1, month.days + 1):
        value = base
        for p in temps:
            if p.days.matches(month, day):
                value = _apply(value, p.op, p.value)
        series.append(value)
    return series


def month_quantity(series: Sequence[float], semantics: Aggregation) -> float:
    """Collapse a daily series to one monthly quantity.

    average: GB-month style proration (mean of daily values).
    sum-of-daily: total after per-day expansion has already happened.
    point: the value in effect on day 1.
    """
    if not series:
        raise ValueError("empty daily series")
    if semantics == Aggregation.AVERAGE:
        return math.fsum(series) / len(series)
    if semantics == Aggregation.SUM_OF_DAILY:
        return math.fsum(series)
    return series[0]
