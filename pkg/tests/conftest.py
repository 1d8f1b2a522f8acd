"""Shared fixtures: demo data loaders, a prebuilt snapshot, and the
acceptance-criteria reporter that prints one PASS/FAIL line per criterion
in the terminal summary (criterion 10, the suite wall-time budget, is
checked in the sessionfinish hook)."""

import time
from pathlib import Path

import pytest

from geosearch.cli import main as cli_main
from geosearch.config import EngineConfig
from geosearch.expand import load_lexicon
from geosearch.gazetteer import load_tsv
from geosearch.geo import load_edge_file
from geosearch.snapshot import build_engine, load_snapshot
from geosearch.textindex import load_corpus_jsonl

DEMO = Path(__file__).resolve().parent.parent / "data" / "demo"

SUITE_BUDGET_S = 60.0

_criteria_key = pytest.StashKey()
_t0_key = pytest.StashKey()


@pytest.fixture(scope="session")
def demo_paths() -> dict:
    return {
        "gazetteer": DEMO / "gazetteer.tsv",
        "corpus": DEMO / "corpus.jsonl",
        "lexicon": DEMO / "lexicon.json",
        "network": DEMO / "network.tsv",
        "config": DEMO / "config.json",
    }


@pytest.fixture()
def demo_gazetteer(demo_paths):
    with open(demo_paths["gazetteer"], encoding="utf-8") as f:
        return load_tsv(f)


@pytest.fixture()
def demo_docs(demo_paths):
    with open(demo_paths["corpus"], encoding="utf-8") as f:
        return load_corpus_jsonl(f)


@pytest.fixture()
def demo_lexicon(demo_paths):
    with open(demo_paths["lexicon"], encoding="utf-8") as f:
        return load_lexicon(f)


@pytest.fixture()
def demo_engine(demo_gazetteer, demo_docs, demo_lexicon, demo_paths):
    coords = {e.id: e.location for e in demo_gazetteer}
    with open(demo_paths["network"], encoding="utf-8") as f:
        network = load_edge_file(f, coords)
    return build_engine(demo_gazetteer, demo_docs, demo_lexicon, network, EngineConfig())


@pytest.fixture(scope="session")
def demo_snapshot_dir(tmp_path_factory, demo_paths) -> Path:
    """A snapshot built once through the real CLI; treat as read-only."""
    out = tmp_path_factory.mktemp("snap") / "demo"
    rc = cli_main(
        [
            "build-index",
            "--gazetteer", str(demo_paths["gazetteer"]),
            "--corpus", str(demo_paths["corpus"]),
            "--lexicon", str(demo_paths["lexicon"]),
            "--network", str(demo_paths["network"]),
            "--config", str(demo_paths["config"]),
            "--out", str(out),
        ]
    )
    assert rc == 0
    return out


@pytest.fixture()
def loaded_engine(demo_snapshot_dir):
    return load_snapshot(demo_snapshot_dir)


@pytest.fixture()
def criterion(request):
    """Record an acceptance criterion verdict and assert it."""

    def record(number: int, ok: bool, detail: str) -> None:
        lines = request.config.stash.setdefault(_criteria_key, {})
        lines[number] = f"[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {detail}"
        assert ok, f"criterion {number}: {detail}"

    return record


def pytest_sessionstart(session):
    session.config.stash[_t0_key] = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - session.config.stash.get(_t0_key, time.perf_counter())
    ok = elapsed < SUITE_BUDGET_S
    lines = session.config.stash.setdefault(_criteria_key, {})
    lines[10] = (
        f"[criterion 10] {'PASS' if ok else 'FAIL'}  "
        f"suite wall time {elapsed:.1f}s (budget {SUITE_BUDGET_S:.0f}s)"
    )
    if not ok and session.exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_criteria_key, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
