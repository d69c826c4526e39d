from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cloudcost.patterns import (
    ALL_MONTHS,
    Aggregation,
    DayRule,
    DayScope,
    Mode,
    Pattern,
    PatternSyntaxError,
    UsageSpec,
    YearMonth,
    daily_series,
    effective_baseline,
    month_quantity,
    parse_patterns,
    patterns_to_text,
)

from oracles import oracle_daily_series

SEP10 = YearMonth.parse("2010-09")

PAPER_SPEC = UsageSpec(
    baseline=100,
    patterns=tuple(parse_patterns(
        "perm: every month +10, temp: every jun-aug on weekends /2, temp: every dec on 25-30 *2")),
)


# --- parsing ----------------------------------------------------------------

def test_parse_three_clause_example():
    patterns = parse_patterns(
        "perm: every month +10, temp: every jun-aug on weekends /2, temp: every dec on 25-30 *2")
    assert len(patterns) == 3
    assert patterns[0] == Pattern(Mode.PERM, ALL_MONTHS, DayRule(), "+", 10)
    assert patterns[1] == Pattern(Mode.TEMP, frozenset({6, 7, 8}),
                                  DayRule(DayScope.WEEKENDS), "/", 2)
    assert patterns[2] == Pattern(Mode.TEMP, frozenset({12}),
                                  DayRule(DayScope.DAY_RANGE, lo=25, hi=30), "*", 2)


def test_parse_teaching_example():
    patterns = parse_patterns("temp: every sep-nov +4, temp: every feb-apr +4")
    assert [p.mode for p in patterns] == [Mode.TEMP, Mode.TEMP]
    assert patterns[0].months == frozenset({9, 10, 11})
    assert patterns[1].months == frozenset({2, 3, 4})
    assert all(p.op == "+" and p.value == 4 for p in patterns)


def test_parse_unknown_mode():
    with pytest.raises(PatternSyntaxError, match="unknown mode"):
        parse_patterns("foo: every month +1")


def test_parse_perm_with_day_scope_rejected():
    with pytest.raises(PatternSyntaxError, match="day scope"):
        parse_patterns("perm: every month on weekends +1")


def test_parse_errors():
    with pytest.raises(PatternSyntaxError, match="unknown month"):
        parse_patterns("temp: every janx +1")
    with pytest.raises(PatternSyntaxError, match="unknown day"):
        parse_patterns("temp: every jan on blursday +1")
    with pytest.raises(PatternSyntaxError, match="missing operator"):
        parse_patterns("temp: every jan 5")
    with pytest.raises(PatternSyntaxError, match="non-numeric"):
        parse_patterns("temp: every jan +abc")
    with pytest.raises(PatternSyntaxError, match="division by zero"):
        parse_patterns("temp: every jan /0")
    with pytest.raises(PatternSyntaxError, match="day numbers"):
        parse_patterns("temp: every jan on 05-31 +1")


def test_parse_position_reported():
    text = "temp: every jan +1, temp: every zzz +1"
    err = None
    try:
        parse_patterns(text)
    except PatternSyntaxError as e:
        err = e
    assert err is not None
    assert err.position == text.index("zzz")


def test_parse_is_case_and_space_insensitive():
    a = parse_patterns("TEMP:  every  JUN-AUG  on  WEEKENDS  /2")
    b = parse_patterns("temp: every jun-aug on weekends / 2")
    assert a == b


def test_parse_empty_text():
    assert parse_patterns("") == []
    assert parse_patterns("   ") == []


def test_parse_wrapping_month_range():
    (p,) = parse_patterns("temp: every nov-feb *3")
    assert p.months == frozenset({11, 12, 1, 2})


def test_parse_single_day_and_weekday_name():
    (p,) = parse_patterns("temp: every dec on 25 *2")
    assert p.days == DayRule(DayScope.DAY_RANGE, lo=25, hi=25)
    (p,) = parse_patterns("temp: every dec on mon *2")
    assert p.days == DayRule(DayScope.WEEKDAY, weekday=1)


# --- effective baseline -------------------------------------------------------

def test_first_month_is_raw_baseline():
    assert effective_baseline(PAPER_SPEC, SEP10, SEP10) == 100


def test_perm_growth_to_december():
    # oracle: iterate month boundaries sep->oct->nov->dec applying +10
    assert effective_baseline(PAPER_SPEC, SEP10, YearMonth.parse("2010-12")) == 130


def test_archive_growth_one_year():
    spec = UsageSpec(baseline=560, patterns=tuple(parse_patterns("perm: every month +15")))
    assert effective_baseline(spec, SEP10, YearMonth.parse("2011-09")) == 740


def test_effective_baseline_precondition():
    with pytest.raises(ValueError):
        effective_baseline(PAPER_SPEC, SEP10, YearMonth.parse("2010-08"))


# --- daily series -------------------------------------------------------------

def test_december_series_doubles_25_to_30():
    series = daily_series(PAPER_SPEC, SEP10, YearMonth.parse("2010-12"))
    assert len(series) == 31
    for day, value in enumerate(series, start=1):
        assert value == (260 if 25 <= day <= 30 else 130)


def test_clamp_at_zero():
    spec = UsageSpec(baseline=0, patterns=tuple(parse_patterns("temp: every jan -5")))
    series = daily_series(spec, YearMonth.parse("2011-01"), YearMonth.parse("2011-01"))
    assert all(v == 0 for v in series)


def test_constant_series_without_patterns():
    spec = UsageSpec(baseline=4)
    series = daily_series(spec, SEP10, YearMonth.parse("2010-10"))
    assert series == [4.0] * 31


def test_weekend_rule_uses_real_calendar():
    spec = UsageSpec(baseline=10, patterns=tuple(parse_patterns("temp: every jul on weekends /2")))
    series = daily_series(spec, YearMonth.parse("2010-07"), YearMonth.parse("2010-07"))
    # July 2010: the 3rd is a Saturday
    assert series[2] == 5 and series[3] == 5
    assert series[0] == 10 and series[4] == 10


# --- month quantity -----------------------------------------------------------

def test_average_quantity_december():
    series = daily_series(PAPER_SPEC, SEP10, YearMonth.parse("2010-12"))
    # (25*130 + 6*260) / 31 = 4810/31
    assert month_quantity(series, Aggregation.AVERAGE) == pytest.approx(4810 / 31, rel=1e-12)


def test_average_and_sum_of_constant_series():
    series = [4.0] * 31
    assert month_quantity(series, Aggregation.AVERAGE) == 4
    assert month_quantity(series, Aggregation.SUM_OF_DAILY) == 124
    assert month_quantity(series, Aggregation.POINT) == 4


def test_month_quantity_rejects_empty():
    with pytest.raises(ValueError):
        month_quantity([], Aggregation.AVERAGE)


# --- order sensitivity --------------------------------------------------------

def test_declaration_order_is_honored():
    plus_then_times = UsageSpec(baseline=5, patterns=tuple(
        parse_patterns("temp: every jan +10, temp: every jan *2")))
    times_then_plus = UsageSpec(baseline=5, patterns=tuple(
        parse_patterns("temp: every jan *2, temp: every jan +10")))
    jan = YearMonth.parse("2011-01")
    assert daily_series(plus_then_times, jan, jan)[0] == 30  # (5+10)*2
    assert daily_series(times_then_plus, jan, jan)[0] == 20  # 5*2+10


# --- canonical text round-trip --------------------------------------------------

@pytest.mark.parametrize("text", [
    "perm: every month +10",
    "temp: every jun-aug on weekends /2",
    "temp: every dec on 25-30 *2",
    "temp: every nov-feb on mon ^0.5",
    "temp: every sep on everyday -3",
])
def test_text_round_trip(text):
    patterns = parse_patterns(text)
    assert parse_patterns(patterns_to_text(patterns)) == patterns


# --- hypothesis properties ------------------------------------------------------

def month_sets() -> st.SearchStrategy[frozenset[int]]:
    def make(start: int, length: int) -> frozenset[int]:
        return frozenset((start - 1 + i) % 12 + 1 for i in range(length))
    return st.one_of(
        st.just(ALL_MONTHS),
        st.builds(make, st.integers(1, 12), st.integers(1, 11)),
    )


def day_rules() -> st.SearchStrategy[DayRule]:
    ranges = st.tuples(st.integers(1, 30), st.integers(1, 30)).map(
        lambda t: DayRule(DayScope.DAY_RANGE, lo=min(t), hi=max(t)))
    return st.one_of(
        st.just(DayRule()),
        st.sampled_from([DayRule(DayScope.EVERYDAY), DayRule(DayScope.WEEKDAYS),
                         DayRule(DayScope.WEEKENDS)]),
        st.integers(1, 7).map(lambda d: DayRule(DayScope.WEEKDAY, weekday=d)),
        ranges,
    )


def pattern_values(op: str) -> st.SearchStrategy[float]:
    if op in "*/":
        return st.one_of(
            st.floats(0.1, 10, allow_nan=False),
            st.floats(-10, -0.1, allow_nan=False),
        )
    return st.floats(-10, 10, allow_nan=False)


@st.composite
def patterns_strategy(draw) -> Pattern:
    mode = draw(st.sampled_from([Mode.TEMP, Mode.PERM]))
    op = draw(st.sampled_from("+-*/"))
    days = draw(day_rules()) if mode == Mode.TEMP else DayRule()
    return Pattern(mode=mode, months=draw(month_sets()), days=days,
                   op=op, value=draw(pattern_values(op)))


@st.composite
def specs_strategy(draw) -> UsageSpec:
    baseline = draw(st.floats(0, 1000, allow_nan=False))
    patterns = tuple(draw(st.lists(patterns_strategy(), max_size=4)))
    return UsageSpec(baseline=baseline, patterns=patterns)


months_strategy = st.integers(0, 23)


@settings(max_examples=1000, deadline=None)
@given(spec=specs_strategy(), offset=months_strategy)
def test_oracle_equivalence_random_specs(spec: UsageSpec, offset: int):
    month = SEP10.plus(offset)
    actual = daily_series(spec, SEP10, month)
    expected = oracle_daily_series(spec, SEP10, month)
    assert len(actual) == len(expected)
    for a, e in zip(actual, expected):
        assert a == pytest.approx(e, rel=1e-9, abs=1e-12)


@settings(deadline=None)
@given(spec=specs_strategy(), offset=months_strategy)
def test_determinism(spec: UsageSpec, offset: int):
    month = SEP10.plus(offset)
    assert daily_series(spec, SEP10, month) == daily_series(spec, SEP10, month)


@settings(deadline=None)
@given(spec=specs_strategy(), offset=months_strategy)
def test_clamp_property(spec: UsageSpec, offset: int):
    assert all(v >= 0 for v in daily_series(spec, SEP10, SEP10.plus(offset)))


@settings(deadline=None)
@given(baseline=st.floats(0, 1000, allow_nan=False),
       value=st.floats(0, 10, allow_nan=False),
       months=month_sets(), offsets=st.tuples(months_strategy, months_strategy))
def test_monotone_additive_perm(baseline, value, months, offsets):
    spec = UsageSpec(baseline=baseline, patterns=(
        Pattern(Mode.PERM, months, DayRule(), "+", value),))
    earlier, later = sorted(offsets)
    assert (effective_baseline(spec, SEP10, SEP10.plus(earlier))
            <= effective_baseline(spec, SEP10, SEP10.plus(later)))


def test_paper_example_against_oracle_24_months():
    for offset in range(24):
        month = SEP10.plus(offset)
        actual = daily_series(PAPER_SPEC, SEP10, month)
        expected = oracle_daily_series(PAPER_SPEC, SEP10, month)
        for a, e in zip(actual, expected):
            assert math.isclose(a, e, rel_tol=1e-9)
