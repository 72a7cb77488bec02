"""opspace: string-edit pattern mining over sentence-pair corpora and
clustering analysis of the induced space of embedding operations."""

__version__ = "0.1.0"

from .corpus import Label, RawPair, SentencePair, tokenize
from .embeddings import EmbeddingMatrix, TokenVectorTable, synthesize_planted
from .ops import OperationKind, OperationPoint, apply_operation, build_operation_space
from .patterns import Pattern, PatternGroup, extract_pattern, extract_template

__all__ = [
    "Label",
    "RawPair",
    "SentencePair",
    "tokenize",
    "EmbeddingMatrix",
    "TokenVectorTable",
    "synthesize_planted",
    "OperationKind",
    "OperationPoint",
    "apply_operation",
    "build_operation_space",
    "Pattern",
    "PatternGroup",
    "extract_pattern",
    "extract_template",
    "__version__",
]
