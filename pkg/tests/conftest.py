from __future__ import annotations

import sys
from pathlib import Path

import pytest

from cloudcost.catalog import load_catalog, load_scenario
from cloudcost.finance import load_plan
from cloudcost.model import load_model
from cloudcost.patterns import MonthWindow, YearMonth

sys.path.insert(0, str(Path(__file__).parent))  # makes oracles importable

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def school_model():
    return load_model(str(FIXTURES / "school.cloudmodel.json"))


@pytest.fixture(scope="session")
def lease_model():
    return load_model(str(FIXTURES / "school-lease.cloudmodel.json"))


@pytest.fixture(scope="session")
def buy_plan():
    return load_plan(str(FIXTURES / "school-buy.plan.json"))


@pytest.fixture(scope="session")
def aws_catalog():
    return load_catalog(str(FIXTURES / "aws-2010-eu.prices.json"))


@pytest.fixture(scope="session")
def cut15_scenario():
    return load_scenario(str(FIXTURES / "cut15.scenario.json"))


@pytest.fixture(scope="session")
def case_window() -> MonthWindow:
    return MonthWindow(YearMonth.parse("2010-09"), YearMonth.parse("2016-08"))
