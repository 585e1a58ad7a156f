"""Agreement reporting: models vs. human majority, split by consensus.

The report compares each model's forced-choice answers against the rater
majority overall and within high/low consensus subsets (high = at least 80%
of votes on one side, agreeing with the gold label when one exists), plus a
model-vs-model agreement matrix. Emitted as versioned JSON and a console
table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

from ..errors import DegenerateInput
from .judgements import JudgementSet
from .kappa import KappaResult, cohen_kappa
from .kappa import fleiss_kappa
from .triplets import Triplet
from .twoafc import Scorer, model_2afc

REPORT_VERSION = 1
HIGH_CONSENSUS_FRACTION = 0.80


@dataclass(frozen=True)
class ConsensusClass:
    triplet_id: str
    consensus: str  # "high" | "low"
    majority_choice: str
    vote_fraction: float


def classify_consensus(
    judgements: JudgementSet, gold: Mapping[str, str] | None = None
) -> dict:
    """triplet_id -> ConsensusClass under the 80%-vote rule."""
    out: dict = {}
    for tid in judgements.triplet_ids:
        choice, fraction = judgements.majority(tid)
        high = fraction >= HIGH_CONSENSUS_FRACTION
        if gold and tid in gold and gold[tid] != choice:
            high = False
        out[tid] = ConsensusClass(
            triplet_id=tid,
            consensus="high" if high else "low",
            majority_choice=choice,
            vote_fraction=fraction,
        )
    return out


def _empty_cell() -> KappaResult:
    return KappaResult(
        kappa=None,
        n_items=0,
        n_raters=2,
        observed_agreement=0.0,
        expected_agreement=0.0,
        undefined=True,
    )


def _kappa_cell(v1: list, v2: list) -> KappaResult:
    if not v1:
        return _empty_cell()
    return cohen_kappa(v1, v2)


def agreement_report(
    triplets: list[Triplet],
    judgements: JudgementSet,
    scorers: Mapping[str, Scorer],
    gold: Mapping[str, str] | None = None,
) -> dict:
    """Score every model on every triplet and assemble the report payload."""
    ids = [t.triplet_id for t in triplets]
    missing = [tid for tid in ids if tid not in judgements.choices]
    if missing:
        raise DegenerateInput(
            f"judgements missing for {len(missing)} triplets, e.g. {missing[0]}"
        )
    by_id = {t.triplet_id: t for t in triplets}
    consensus = classify_consensus(judgements, gold)
    majority = {tid: consensus[tid].majority_choice for tid in ids}
    splits = {
        "overall": ids,
        "high": [t for t in ids if consensus[t].consensus == "high"],
        "low": [t for t in ids if consensus[t].consensus == "low"],
    }

    model_choices: dict = {}
    model_ties: dict = {}
    for tag in sorted(scorers):
        answers = [model_2afc(scorers[tag], by_id[tid]) for tid in ids]
        model_choices[tag] = {a.triplet_id: a.choice for a in answers}
        model_ties[tag] = sum(1 for a in answers if a.tie)

    models_payload: dict = {}
    for tag in sorted(scorers):
        vs_majority = {}
        for split_name, split_ids in splits.items():
            vs_majority[split_name] = _kappa_cell(
                [model_choices[tag][t] for t in split_ids],
                [majority[t] for t in split_ids],
            ).to_json()
        models_payload[tag] = {
            "choices": {t: model_choices[tag][t] for t in ids},
            "ties": model_ties[tag],
            "kappa_vs_majority": vs_majority,
        }

    matrix: dict = {}
    for tag_a in sorted(scorers):
        matrix[tag_a] = {}
        for tag_b in sorted(scorers):
            cell = _kappa_cell(
                [model_choices[tag_a][t] for t in ids],
                [model_choices[tag_b][t] for t in ids],
            )
            matrix[tag_a][tag_b] = cell.kappa

    return {
        "report_version": REPORT_VERSION,
        "n_triplets": len(ids),
        "n_raters": judgements.n_raters,
        "inter_rater": fleiss_kappa(judgements).to_json(),
        "consensus": [
            {
                "triplet_id": tid,
                "class": consensus[tid].consensus,
                "majority_choice": consensus[tid].majority_choice,
                "vote_fraction": consensus[tid].vote_fraction,
            }
            for tid in sorted(ids)
        ],
        "split_sizes": {name: len(split) for name, split in splits.items()},
        "models": models_payload,
        "model_matrix": matrix,
    }


def write_report(report: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(kappa) -> str:
    return "   n/a" if kappa is None else f"{kappa:6.3f}"


def format_report_table(report: dict) -> str:
    lines = [
        f"triplets: {report['n_triplets']}  raters: {report['n_raters']}  "
        f"inter-rater kappa: {_fmt(report['inter_rater']['kappa']).strip()}",
        f"consensus split: high={report['split_sizes']['high']} "
        f"low={report['split_sizes']['low']}",
        "",
        f"{'model':<16} {'overall':>8} {'high':>8} {'low':>8} {'ties':>6}",
    ]
    for tag, payload in report["models"].items():
        cells = payload["kappa_vs_majority"]
        lines.append(
            f"{tag:<16} {_fmt(cells['overall']['kappa']):>8} "
            f"{_fmt(cells['high']['kappa']):>8} {_fmt(cells['low']['kappa']):>8} "
            f"{payload['ties']:>6}"
        )
    return "\n".join(lines)
