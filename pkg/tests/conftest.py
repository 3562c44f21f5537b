from datetime import date
from pathlib import Path

import pytest

from recalldrift import AudienceScope, FeatureVector, ProvenanceRecord, ReuseEvent

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def golden_dir():
    return GOLDEN


def make_event(n, day=0, scope=AudienceScope.FRIENDS, outgoing=None, age=200.0, hesitation=0.0,
               sensitive=False, with_prov=True, **kwargs):
    prov = ProvenanceRecord(f"item{n}", scope, date(2024, 5, 1), "a", "post", sensitive) if with_prov else None
    feats = FeatureVector.from_age(age, hesitation=hesitation, sensitive=sensitive)
    return ReuseEvent(f"ev{n:05d}", f"item{n}", day, feats, prov, outgoing, **kwargs)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
