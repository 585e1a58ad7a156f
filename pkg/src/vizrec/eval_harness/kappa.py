"""Chance-corrected inter-rater agreement over two-category choices.

Both statistics share one computation over the item x category count matrix
with pooled category marginals, so the two-rater kappa agrees exactly with
the many-rater statistic evaluated at n=2. When expected agreement is 1
(every vote in a single category) kappa is undefined and flagged rather than
raised.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DegenerateInput
from .judgements import CHOICES, JudgementSet


@dataclass(frozen=True)
class KappaResult:
    kappa: float | None  # None when undefined (expected agreement = 1)
    n_items: int
    n_raters: int
    observed_agreement: float
    expected_agreement: float
    undefined: bool = False

    def to_json(self) -> dict:
        return {
            "kappa": self.kappa,
            "n_items": self.n_items,
            "n_raters": self.n_raters,
            "observed_agreement": self.observed_agreement,
            "expected_agreement": self.expected_agreement,
            "undefined": self.undefined,
        }


def _kappa_from_counts(counts: np.ndarray) -> KappaResult:
    n_items, _ = counts.shape
    raters = int(counts[0].sum())
    if raters < 2:
        raise DegenerateInput(f"kappa needs >= 2 raters, got {raters}")
    per_item = (np.sum(counts * counts, axis=1) - raters) / (raters * (raters - 1))
    observed = float(np.mean(per_item))
    marginals = counts.sum(axis=0) / (n_items * raters)
    expected = float(np.sum(marginals * marginals))
    if expected >= 1.0:
        return KappaResult(
            kappa=None,
            n_items=n_items,
            n_raters=raters,
            observed_agreement=observed,
            expected_agreement=expected,
            undefined=True,
        )
    return KappaResult(
        kappa=(observed - expected) / (1.0 - expected),
        n_items=n_items,
        n_raters=raters,
        observed_agreement=observed,
        expected_agreement=expected,
    )


def fleiss_kappa(judgements: JudgementSet) -> KappaResult:
    """Agreement among a fixed number of raters over A/B choices."""
    ids = judgements.triplet_ids
    counts = np.array([judgements.vote_counts(t) for t in ids], dtype=np.float64)
    return _kappa_from_counts(counts)


def cohen_kappa(rater1: Sequence[str], rater2: Sequence[str]) -> KappaResult:
    """Two-rater kappa; identical to the many-rater statistic at n=2."""
    if len(rater1) != len(rater2):
        raise DegenerateInput(
            f"choice vectors differ in length: {len(rater1)} vs {len(rater2)}"
        )
    if not rater1:
        raise DegenerateInput("kappa needs at least one item")
    for vec in (rater1, rater2):
        for choice in vec:
            if choice not in CHOICES:
                raise DegenerateInput(f"invalid choice {choice!r}")
    counts = np.zeros((len(rater1), len(CHOICES)), dtype=np.float64)
    for i, (a, b) in enumerate(zip(rater1, rater2)):
        counts[i, CHOICES.index(a)] += 1
        counts[i, CHOICES.index(b)] += 1
    return _kappa_from_counts(counts)
