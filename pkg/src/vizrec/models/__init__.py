"""Document-representation models: TF-IDF, LSI, LDA, and averaged embeddings."""

from .vocabulary import SparseVector, Vocabulary, build_vocabulary
from .tfidf import TfIdfModel, fit_tfidf, load_tfidf, save_tfidf, tfidf_matrix, tfidf_vector
from .lsi import LsiModel, fit_lsi, load_lsi, lsi_project, randomized_svd, save_lsi
from .lda import LdaModel, TopicDistribution, fit_lda, lda_infer, load_lda, save_lda
from .embeddings import (
    WordVectorTable,
    embed_document,
    load_word_vector_container,
    load_word_vectors,
    save_word_vectors,
)

__all__ = [
    "SparseVector",
    "Vocabulary",
    "build_vocabulary",
    "TfIdfModel",
    "fit_tfidf",
    "save_tfidf",
    "load_tfidf",
    "tfidf_vector",
    "tfidf_matrix",
    "LsiModel",
    "fit_lsi",
    "save_lsi",
    "load_lsi",
    "lsi_project",
    "randomized_svd",
    "LdaModel",
    "TopicDistribution",
    "fit_lda",
    "lda_infer",
    "save_lda",
    "load_lda",
    "WordVectorTable",
    "load_word_vectors",
    "save_word_vectors",
    "load_word_vector_container",
    "embed_document",
]
