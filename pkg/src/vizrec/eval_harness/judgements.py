"""Rater-choice containers and their CSV formats.

Judgement CSV header: ``triplet_id,rater_id,choice`` with choice in {A, B}.
Gold CSV header: ``triplet_id,choice``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import DegenerateInput, IoError

CHOICES = ("A", "B")


@dataclass(frozen=True)
class JudgementSet:
    """Per-triplet rater choices; every triplet has the same rater count."""

    choices: dict = field(repr=False)  # triplet_id -> {rater_id: "A"|"B"}

    def __post_init__(self):
        if not self.choices:
            raise DegenerateInput("judgement set has no triplets")
        counts = {len(raters) for raters in self.choices.values()}
        if len(counts) != 1:
            raise DegenerateInput(
                f"unequal rater counts across triplets: {sorted(counts)}"
            )
        for tid, raters in self.choices.items():
            for rater, choice in raters.items():
                if choice not in CHOICES:
                    raise DegenerateInput(
                        f"invalid choice {choice!r} for {tid}/{rater}"
                    )

    @property
    def n_raters(self) -> int:
        return len(next(iter(self.choices.values())))

    @property
    def triplet_ids(self) -> list[str]:
        return sorted(self.choices)

    def vote_counts(self, triplet_id: str) -> tuple[int, int]:
        """(#A, #B) votes for one triplet."""
        raters = self.choices[triplet_id]
        n_a = sum(1 for c in raters.values() if c == "A")
        return n_a, len(raters) - n_a

    def majority(self, triplet_id: str) -> tuple[str, float]:
        """(majority choice, vote fraction); exact ties resolve to A at 0.5."""
        n_a, n_b = self.vote_counts(triplet_id)
        if n_a >= n_b:
            return "A", n_a / (n_a + n_b)
        return "B", n_b / (n_a + n_b)


def load_judgements_csv(path) -> JudgementSet:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read judgements: {path}: {exc}") from exc
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames != ["triplet_id", "rater_id", "choice"]:
        raise IoError(
            f"judgement CSV must have header triplet_id,rater_id,choice: {path}"
        )
    choices: dict = {}
    for row in reader:
        per_rater = choices.setdefault(row["triplet_id"], {})
        if row["rater_id"] in per_rater:
            raise DegenerateInput(
                f"duplicate vote: {row['triplet_id']}/{row['rater_id']}"
            )
        per_rater[row["rater_id"]] = row["choice"]
    return JudgementSet(choices)


def write_judgements_csv(judgements: JudgementSet, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["triplet_id", "rater_id", "choice"])
        for tid in judgements.triplet_ids:
            for rater in sorted(judgements.choices[tid]):
                writer.writerow([tid, rater, judgements.choices[tid][rater]])


def load_gold_csv(path) -> dict:
    """triplet_id -> gold choice."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read gold labels: {path}: {exc}") from exc
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames != ["triplet_id", "choice"]:
        raise IoError(f"gold CSV must have header triplet_id,choice: {path}")
    gold: dict = {}
    for row in reader:
        if row["choice"] not in CHOICES:
            raise DegenerateInput(f"invalid gold choice {row['choice']!r}")
        gold[row["triplet_id"]] = row["choice"]
    return gold
