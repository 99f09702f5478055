import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rctextract.corpus import parse_annotated  # noqa: E402
from rctextract.eval.synthetic import generate_synthetic  # noqa: E402
from rctextract.extractor import EvidenceExtractor  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def table1_text():
    return (DATA / "table1.txt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def table1(table1_text):
    return parse_annotated(table1_text, "table1")


@pytest.fixture(scope="session")
def synth_small():
    return generate_synthetic(40, seed=7, noise="medium")


@pytest.fixture(scope="session")
def fitted(synth_small):
    return EvidenceExtractor(max_iter=200).fit(synth_small)


def pytest_terminal_summary(terminalreporter):
    lines = getattr(sys.modules.get("test_acceptance"), "REPORT", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
