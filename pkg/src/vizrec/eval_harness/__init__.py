"""Evaluation harness: triplet sampling, 2AFC scoring, agreement statistics.

Human judgements are an input file format (CSV); the harness also ships a
synthetic noisy-rater generator so the full reporting path can run without a
crowdsourcing study.
"""

from .judgements import JudgementSet, load_gold_csv, load_judgements_csv, write_judgements_csv
from .kappa import KappaResult, cohen_kappa, fleiss_kappa
from .triplets import Triplet, load_triplets_csv, sample_triplets, write_triplets_csv
from .twoafc import (
    TwoAfcChoice,
    embedding_scorer,
    lda_scorer,
    lsi_scorer,
    model_2afc,
    tfidf_scorer,
)
from .report import ConsensusClass, agreement_report, format_report_table, write_report
from .synthetic import synthetic_judgements

__all__ = [
    "JudgementSet",
    "load_judgements_csv",
    "write_judgements_csv",
    "load_gold_csv",
    "KappaResult",
    "fleiss_kappa",
    "cohen_kappa",
    "Triplet",
    "sample_triplets",
    "load_triplets_csv",
    "write_triplets_csv",
    "TwoAfcChoice",
    "model_2afc",
    "tfidf_scorer",
    "lsi_scorer",
    "lda_scorer",
    "embedding_scorer",
    "ConsensusClass",
    "agreement_report",
    "format_report_table",
    "write_report",
    "synthetic_judgements",
]
