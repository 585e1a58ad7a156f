"""Latent Dirichlet Allocation fit by collapsed Gibbs sampling.

Symmetric Dirichlet priors (alpha = 50/k, beta = 0.01 by default); the
token-level sampling loop is JIT-compiled when numba is available and falls
back to the identical pure-Python arithmetic otherwise. All randomness comes
from one seeded PCG64 stream, so a fit is a deterministic function of
(corpus order, hyperparameters, seed). Unseen documents are folded in against
the frozen topic-word distribution rather than refit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyCorpus, EmptyDocument, InvalidK
from ..text_pipeline import Document
from .vocabulary import Vocabulary, build_vocabulary
from . import container

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an optional accelerator
    def njit(*a, **kw):
        def wrap(fn):
            return fn

        return wrap

DEFAULT_ITERATIONS = 1000
DEFAULT_BETA = 0.01
FOLD_IN_ITERATIONS = 200
# fraction of final fold-in sweeps averaged into the document distribution
FOLD_IN_TAIL = 0.2


@njit(cache=True)
def _gibbs_sweep(tokens, doc_ptr, z, n_dk, n_kw, n_k, alpha, beta, uniforms, cum):
    k = n_kw.shape[0]
    beta_sum = beta * n_kw.shape[1]
    for d in range(doc_ptr.shape[0] - 1):
        for i in range(doc_ptr[d], doc_ptr[d + 1]):
            w = tokens[i]
            old = z[i]
            n_dk[d, old] -= 1
            n_kw[old, w] -= 1
            n_k[old] -= 1
            total = 0.0
            for j in range(k):
                total += (
                    (n_dk[d, j] + alpha)
                    * (n_kw[j, w] + beta)
                    / (n_k[j] + beta_sum)
                )
                cum[j] = total
            r = uniforms[i] * total
            new = 0
            while new < k - 1 and cum[new] <= r:
                new += 1
            z[i] = new
            n_dk[d, new] += 1
            n_kw[new, w] += 1
            n_k[new] += 1


@njit(cache=True)
def _fold_in_sweep(tokens, z, n_j, phi, alpha, uniforms, cum):
    k = phi.shape[0]
    for i in range(tokens.shape[0]):
        w = tokens[i]
        old = z[i]
        n_j[old] -= 1
        total = 0.0
        for j in range(k):
            total += (n_j[j] + alpha) * phi[j, w]
            cum[j] = total
        r = uniforms[i] * total
        new = 0
        while new < k - 1 and cum[new] <= r:
            new += 1
        z[i] = new
        n_j[new] += 1


@dataclass(frozen=True)
class TopicDistribution:
    """Per-document topic probabilities (sums to one)."""

    probabilities: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "probabilities", np.asarray(self.probabilities, dtype=np.float64)
        )

    @property
    def k(self) -> int:
        return int(self.probabilities.shape[0])


@dataclass(frozen=True)
class LdaModel:
    k: int
    alpha: float
    beta: float
    topic_word: np.ndarray  # k x |V| row-stochastic
    seed: int
    vocabulary: Vocabulary
    doc_topic: np.ndarray = field(repr=False, default=None)  # training thetas
    iterations: int = DEFAULT_ITERATIONS
    perplexity_trace: tuple = ()

    def top_tokens(self, topic: int, n: int = 10) -> list[str]:
        order = np.argsort(-self.topic_word[topic])[:n]
        return [self.vocabulary.index_to_token[i] for i in order]


def _expand_tokens(doc: Document, vocab: Vocabulary) -> np.ndarray:
    out: list[int] = []
    for token in sorted(doc.counts):
        idx = vocab.token_to_index.get(token)
        if idx is not None:
            out.extend([idx] * doc.counts[token])
    return np.array(out, dtype=np.int64)


def _perplexity(tokens, doc_ptr, n_dk, n_kw, alpha, beta) -> float:
    theta = n_dk + alpha
    theta /= theta.sum(axis=1, keepdims=True)
    phi = n_kw + beta
    phi /= phi.sum(axis=1, keepdims=True)
    ll = 0.0
    for d in range(doc_ptr.shape[0] - 1):
        ws = tokens[doc_ptr[d] : doc_ptr[d + 1]]
        if ws.size:
            ll += float(np.sum(np.log(theta[d] @ phi[:, ws])))
    return float(np.exp(-ll / max(1, tokens.shape[0])))


def fit_lda(
    docs: list[Document],
    k: int,
    seed: int,
    iterations: int = DEFAULT_ITERATIONS,
    alpha: float | None = None,
    beta: float = DEFAULT_BETA,
    vocabulary: Vocabulary | None = None,
    checkpoint_every: int | None = None,
) -> LdaModel:
    """Collapsed Gibbs fit over the documents, in the order given.

    ``checkpoint_every`` records a training-set perplexity trace at that sweep
    interval (useful for convergence checks; off by default).
    """
    if not docs:
        raise EmptyCorpus("LDA needs at least one document")
    if k < 2:
        raise InvalidK(f"topic count must be >= 2, got {k}")
    vocab = vocabulary if vocabulary is not None else build_vocabulary(docs)
    if alpha is None:
        alpha = 50.0 / k

    per_doc = [_expand_tokens(d, vocab) for d in docs]
    doc_ptr = np.cumsum([0] + [t.size for t in per_doc]).astype(np.int64)
    tokens = (
        np.concatenate(per_doc) if any(t.size for t in per_doc) else np.empty(0, np.int64)
    )
    if tokens.size == 0:
        raise EmptyCorpus("no in-vocabulary tokens in the corpus")

    rng = np.random.default_rng(seed)
    z = np.minimum((rng.random(tokens.size) * k).astype(np.int64), k - 1)
    n_dk = np.zeros((len(docs), k), dtype=np.int64)
    n_kw = np.zeros((k, len(vocab)), dtype=np.int64)
    n_k = np.zeros(k, dtype=np.int64)
    for d in range(len(docs)):
        for i in range(doc_ptr[d], doc_ptr[d + 1]):
            n_dk[d, z[i]] += 1
            n_kw[z[i], tokens[i]] += 1
            n_k[z[i]] += 1

    cum = np.empty(k, dtype=np.float64)
    trace = []
    for sweep in range(iterations):
        uniforms = rng.random(tokens.size)
        _gibbs_sweep(tokens, doc_ptr, z, n_dk, n_kw, n_k, alpha, beta, uniforms, cum)
        if checkpoint_every and (sweep + 1) % checkpoint_every == 0:
            trace.append(
                (sweep + 1, _perplexity(tokens, doc_ptr, n_dk.astype(np.float64),
                                        n_kw.astype(np.float64), alpha, beta))
            )

    phi = n_kw + beta
    phi /= phi.sum(axis=1, keepdims=True)
    theta = n_dk + alpha
    theta /= theta.sum(axis=1, keepdims=True)
    return LdaModel(
        k=k,
        alpha=alpha,
        beta=beta,
        topic_word=phi,
        seed=seed,
        vocabulary=vocab,
        doc_topic=theta,
        iterations=iterations,
        perplexity_trace=tuple(trace),
    )


def lda_infer(
    model: LdaModel,
    doc: Document,
    seed: int,
    iterations: int = FOLD_IN_ITERATIONS,
) -> TopicDistribution:
    """Fold-in Gibbs against frozen topic-word counts.

    The returned distribution averages the per-sweep estimates over the final
    20% of sweeps; deterministic for a fixed seed.
    """
    tokens = _expand_tokens(doc, model.vocabulary)
    if tokens.size == 0:
        raise EmptyDocument(f"no in-vocabulary tokens: {doc.workbook_id}")
    k = model.k
    rng = np.random.default_rng(seed)
    z = np.minimum((rng.random(tokens.size) * k).astype(np.int64), k - 1)
    n_j = np.zeros(k, dtype=np.int64)
    for t in z:
        n_j[t] += 1
    cum = np.empty(k, dtype=np.float64)
    tail = max(1, int(iterations * FOLD_IN_TAIL))
    acc = np.zeros(k, dtype=np.float64)
    denom = tokens.size + k * model.alpha
    for sweep in range(iterations):
        uniforms = rng.random(tokens.size)
        _fold_in_sweep(tokens, z, n_j, model.topic_word, model.alpha, uniforms, cum)
        if sweep >= iterations - tail:
            acc += (n_j + model.alpha) / denom
    return TopicDistribution(acc / tail)


def save_lda(model: LdaModel, path) -> None:
    container.write_container(
        path,
        {
            "topic_word": model.topic_word,
            "doc_topic": model.doc_topic if model.doc_topic is not None else np.empty((0, model.k)),
            "tokens": container.json_section(model.vocabulary.index_to_token),
            "df": model.vocabulary.df_array,
            "meta": container.json_section(
                {
                    "k": model.k,
                    "alpha": model.alpha,
                    "beta": model.beta,
                    "seed": model.seed,
                    "iterations": model.iterations,
                    "n_documents": model.vocabulary.n_documents,
                    "min_df": model.vocabulary.min_df,
                }
            ),
        },
        kind="lda",
    )


def load_lda(path) -> LdaModel:
    sections = container.read_container(path, kind="lda")
    meta = container.json_value(sections["meta"])
    tokens = container.json_value(sections["tokens"])
    df = sections["df"]
    vocab = Vocabulary(
        token_to_index={t: i for i, t in enumerate(tokens)},
        index_to_token=list(tokens),
        document_frequency={t: int(df[i]) for i, t in enumerate(tokens)},
        n_documents=int(meta["n_documents"]),
        min_df=int(meta["min_df"]),
    )
    doc_topic = sections["doc_topic"]
    return LdaModel(
        k=int(meta["k"]),
        alpha=float(meta["alpha"]),
        beta=float(meta["beta"]),
        topic_word=sections["topic_word"],
        seed=int(meta["seed"]),
        vocabulary=vocab,
        doc_topic=doc_topic if doc_topic.size else None,
        iterations=int(meta["iterations"]),
    )
