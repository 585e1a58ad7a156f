"""Synthetic rater panels: noisy votes around a planted ground truth.

Stands in for a crowdsourced study so the agreement pipeline can be exercised
(and regression-pinned) end to end. The gold answer for each triplet is the
alternative with the higher baseline score; each simulated rater votes for it
with probability ``accuracy``.
"""

from __future__ import annotations

import numpy as np

from .judgements import JudgementSet
from .triplets import Triplet


def planted_gold(triplets: list[Triplet]) -> dict:
    """triplet_id -> better alternative by baseline score."""
    return {
        t.triplet_id: "A" if t.score_a >= t.score_b else "B" for t in triplets
    }


def synthetic_judgements(
    triplets: list[Triplet],
    n_raters: int,
    accuracy: float,
    seed: int,
) -> tuple[JudgementSet, dict]:
    """Simulate a rater panel; returns (judgements, gold labels)."""
    gold = planted_gold(triplets)
    rng = np.random.default_rng(seed)
    choices: dict = {}
    for triplet in triplets:
        answer = gold[triplet.triplet_id]
        other = "B" if answer == "A" else "A"
        choices[triplet.triplet_id] = {
            f"r{idx:03d}": answer if rng.random() < accuracy else other
            for idx in range(n_raters)
        }
    return JudgementSet(choices), gold
