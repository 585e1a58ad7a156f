"""Two-alternative forced-choice triplet sampling.

A triplet is a reference document and two alternatives whose baseline
similarities to the reference differ enough that one answer is defensibly
better. Constraints: both baseline TF-IDF cosines in [0.15, 0.9], score gap
>= 0.45, document length 10-200 words, and no document appears in more than
two triplets. References are drawn round-robin across topic strata (argmax
topic of an LDA fit) so triplets cover the corpus's subject areas.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import InsufficientCorpus, IoError
from ..text_pipeline import Document
from ..models import fit_lda, fit_tfidf, tfidf_matrix

SCORE_LOW = 0.15
SCORE_HIGH = 0.90
MIN_DELTA = 0.45
MIN_WORDS = 10
MAX_WORDS = 200
MAX_USES_PER_DOC = 2
STRATIFY_TOPICS = 10
STRATIFY_ITERATIONS = 100


@dataclass(frozen=True)
class Triplet:
    triplet_id: str
    reference: str
    alt_a: str
    alt_b: str
    score_a: float  # baseline TF-IDF cosine(reference, alt_a)
    score_b: float

    def __post_init__(self):
        ids = {self.reference, self.alt_a, self.alt_b}
        if len(ids) != 3:
            raise InsufficientCorpus(
                f"triplet {self.triplet_id} ids are not distinct: {sorted(ids)}"
            )
        for score in (self.score_a, self.score_b):
            if not SCORE_LOW <= score <= SCORE_HIGH:
                raise InsufficientCorpus(
                    f"triplet {self.triplet_id} score {score} outside "
                    f"[{SCORE_LOW}, {SCORE_HIGH}]"
                )
        if abs(self.score_a - self.score_b) < MIN_DELTA:
            raise InsufficientCorpus(
                f"triplet {self.triplet_id} score gap "
                f"{abs(self.score_a - self.score_b)} below {MIN_DELTA}"
            )


def _argmax_topics(docs: list[Document], seed: int) -> dict:
    k = STRATIFY_TOPICS
    model = fit_lda(docs, k=k, seed=seed, iterations=STRATIFY_ITERATIONS)
    return {
        doc.workbook_id: int(np.argmax(model.doc_topic[i]))
        for i, doc in enumerate(docs)
    }


def sample_triplets(
    docs: list[Document],
    n: int,
    seed: int,
    topics: dict | None = None,
) -> list[Triplet]:
    """Draw ``n`` constraint-satisfying triplets, deterministically per seed.

    ``topics`` maps document id to a stratum label; when omitted, strata come
    from the argmax topic of an LDA fit on the eligible documents (same seed).
    """
    eligible = [d for d in docs if MIN_WORDS <= d.total_tokens <= MAX_WORDS]
    if len(eligible) < 3:
        raise InsufficientCorpus(
            f"only {len(eligible)} documents in the {MIN_WORDS}-{MAX_WORDS} "
            "word range; need at least 3"
        )
    ids = [d.workbook_id for d in eligible]
    index_of = {doc_id: i for i, doc_id in enumerate(ids)}

    model = fit_tfidf(eligible)
    rows = tfidf_matrix(model, eligible)
    gram = np.asarray((rows @ rows.T).todense())
    np.clip(gram, 0.0, 1.0, out=gram)

    if topics is None:
        topics = _argmax_topics(eligible, seed)
    strata: dict = {}
    for doc_id in ids:
        strata.setdefault(topics.get(doc_id, -1), []).append(doc_id)

    rng = np.random.default_rng(seed)
    usage = {doc_id: 0 for doc_id in ids}
    triplets: list[Triplet] = []

    def try_reference(ref_id: str) -> Triplet | None:
        ref = index_of[ref_id]
        candidates = [
            c
            for c, cid in enumerate(ids)
            if c != ref
            and usage[cid] < MAX_USES_PER_DOC
            and SCORE_LOW <= gram[ref, c] <= SCORE_HIGH
        ]
        if len(candidates) < 2:
            return None
        order = rng.permutation(len(candidates))
        for pos in order:
            x = candidates[int(pos)]
            partners = [
                y for y in candidates if abs(gram[ref, y] - gram[ref, x]) >= MIN_DELTA
            ]
            if not partners:
                continue
            y = partners[int(rng.integers(len(partners)))]
            first, second = (x, y) if rng.random() < 0.5 else (y, x)
            return Triplet(
                triplet_id=f"t{len(triplets):04d}",
                reference=ref_id,
                alt_a=ids[first],
                alt_b=ids[second],
                score_a=float(gram[ref, first]),
                score_b=float(gram[ref, second]),
            )
        return None

    while len(triplets) < n:
        stratum_keys = sorted(strata)
        queues = {
            key: list(
                np.array(strata[key], dtype=object)[
                    rng.permutation(len(strata[key]))
                ]
            )
            for key in stratum_keys
        }
        progressed = False
        while len(triplets) < n and any(queues.values()):
            for key in stratum_keys:
                if len(triplets) >= n:
                    break
                while queues[key]:
                    ref_id = queues[key].pop()
                    if usage[ref_id] >= MAX_USES_PER_DOC:
                        continue
                    triplet = try_reference(ref_id)
                    if triplet is not None:
                        triplets.append(triplet)
                        for member in (triplet.reference, triplet.alt_a, triplet.alt_b):
                            usage[member] += 1
                        progressed = True
                    break
        if not progressed:
            raise InsufficientCorpus(
                f"could only assemble {len(triplets)} of {n} requested triplets "
                "under the score-band, gap, and reuse constraints; provide a "
                "larger or more varied corpus or request fewer triplets"
            )
    return triplets


def write_triplets_csv(triplets: list[Triplet], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["triplet_id", "reference", "alt_a", "alt_b", "score_a", "score_b"]
        )
        for t in triplets:
            writer.writerow(
                [t.triplet_id, t.reference, t.alt_a, t.alt_b,
                 repr(t.score_a), repr(t.score_b)]
            )


def load_triplets_csv(path) -> list[Triplet]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read triplets: {path}: {exc}") from exc
    reader = csv.DictReader(text.splitlines())
    expected = ["triplet_id", "reference", "alt_a", "alt_b", "score_a", "score_b"]
    if reader.fieldnames != expected:
        raise IoError(f"triplet CSV must have header {','.join(expected)}: {path}")
    return [
        Triplet(
            triplet_id=row["triplet_id"],
            reference=row["reference"],
            alt_a=row["alt_a"],
            alt_b=row["alt_b"],
            score_a=float(row["score_a"]),
            score_b=float(row["score_b"]),
        )
        for row in reader
    ]
