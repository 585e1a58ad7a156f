"""Shared fixtures and the acceptance-summary reporter."""

from __future__ import annotations

import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from corpusgen import (  # noqa: E402
    clone_repo,
    graded_documents,
    minhash_documents,
    mixed_repo,
    planted_two_topic_docs,
    topic_repo,
)
from vizrec.config import RunConfig  # noqa: E402
from vizrec.models import fit_lda  # noqa: E402
from vizrec.recommender_service import build_index  # noqa: E402
from vizrec.spec_ingest import workbook_id_for_path  # noqa: E402


@pytest.fixture(scope="session")
def graded_docs():
    return graded_documents(500, seed=7)


@pytest.fixture(scope="session")
def minhash_fixture():
    return minhash_documents(100, seed=19)


@pytest.fixture(scope="session")
def planted_lda():
    """Two-theme corpus fit twice with one seed (for determinism checks)."""
    docs, labels = planted_two_topic_docs(100, seed=29)
    start = time.monotonic()
    model = fit_lda(docs, k=2, seed=42, iterations=300, checkpoint_every=30)
    fit_seconds = time.monotonic() - start
    repeat = fit_lda(docs, k=2, seed=42, iterations=300, checkpoint_every=30)
    return {
        "docs": docs,
        "labels": labels,
        "model": model,
        "repeat": repeat,
        "fit_seconds": fit_seconds,
    }


@pytest.fixture(scope="session")
def mixed_build(tmp_path_factory):
    """Mixed-edge-case repo built once: (bundle, report, role->workbook_id)."""
    root = tmp_path_factory.mktemp("mixed")
    repo = root / "repo"
    roles = mixed_repo(repo)
    ids = {role: workbook_id_for_path(rel) for role, rel in roles.items()}
    config = RunConfig(
        repo_path=str(repo),
        bundle_path=str(root / "bundle"),
        seed=42,
        lda_k=12,
        lda_iterations=500,
    )
    bundle, report = build_index(str(repo), config, output_path=str(root / "bundle"))
    return {
        "bundle": bundle,
        "report": report,
        "ids": ids,
        "repo": repo,
        "bundle_dir": root / "bundle",
        "config": config,
    }


@pytest.fixture(scope="session")
def topic_build(tmp_path_factory):
    """200-workbook planted-topic repo built once: (bundle, id->topic)."""
    root = tmp_path_factory.mktemp("topic")
    repo = root / "repo"
    assignment = topic_repo(repo, n_workbooks=200, n_topics=10, seed=11)
    topic_of = {workbook_id_for_path(rel): t for rel, t in assignment.items()}
    config = RunConfig(
        repo_path=str(repo), bundle_path="", seed=42, lda_k=10, lda_iterations=300
    )
    start = time.monotonic()
    bundle, report = build_index(str(repo), config)
    build_seconds = time.monotonic() - start
    return {
        "bundle": bundle,
        "report": report,
        "topic_of": topic_of,
        "repo": repo,
        "build_seconds": build_seconds,
    }


@pytest.fixture(scope="session")
def clone_build(tmp_path_factory):
    """20-clone + 20-distractor repo built once."""
    root = tmp_path_factory.mktemp("clone")
    repo = root / "repo"
    clone_names = clone_repo(repo, n_clones=20, n_distractors=20, seed=13)
    clone_ids = {workbook_id_for_path(rel) for rel in clone_names}
    config = RunConfig(
        repo_path=str(repo), bundle_path="", seed=42, lda_k=6, lda_iterations=400
    )
    bundle, report = build_index(str(repo), config)
    return {"bundle": bundle, "report": report, "clone_ids": clone_ids, "repo": repo}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one pass/fail line per acceptance criterion."""
    try:
        from test_acceptance import CRITERIA
    except Exception:
        return
    outcomes: dict[str, str] = {}
    for status in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(status, []):
            name = getattr(report, "location", (None, None, ""))[2]
            base = name.split("[")[0]
            if base in CRITERIA and "test_acceptance" in report.nodeid:
                prior = outcomes.get(base)
                outcomes[base] = (
                    "FAIL" if status in ("failed", "error") or prior == "FAIL"
                    else ("SKIP" if status == "skipped" else "PASS")
                )
    if not outcomes:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for test_name, description in CRITERIA.items():
        verdict = outcomes.get(test_name, "NOT RUN")
        terminalreporter.write_line(f"{verdict:<8} {description}")
