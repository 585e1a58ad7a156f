"""Content-based recommendations for repositories of visualization workbooks.

Pipeline: XML/JSON workbook specs are parsed into text features, turned into
token documents under several feature profiles, embedded by TF-IDF / LSI /
LDA / word-vector models, scored pairwise, and served as faceted
recommendations (related, versions, similar data) behind an HTTP API.
"""

__version__ = "1.0.0"
