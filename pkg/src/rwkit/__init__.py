"""Toolkit for discourse-level annotation of related-work sections:
schema and validation, BIO round trips, a joint neural tagger, corpus
analyses, a span-generation harness, and a correction service.
"""

from rwkit.schema import (
    CITATION_TYPES,
    CS_TAGS,
    CT_TAGS,
    DISCOURSE_LABELS,
    DOMINANT,
    REFERENCE,
    Citation,
    CitationMark,
    CitationSpan,
    LabeledParagraph,
    Paragraph,
    SchemaError,
    TagSequence,
    Violation,
    build_paragraph,
    from_bio,
    repair_prediction,
    repair_tags,
    to_bio,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "CITATION_TYPES",
    "CS_TAGS",
    "CT_TAGS",
    "DISCOURSE_LABELS",
    "DOMINANT",
    "REFERENCE",
    "Citation",
    "CitationMark",
    "CitationSpan",
    "LabeledParagraph",
    "Paragraph",
    "SchemaError",
    "TagSequence",
    "Violation",
    "build_paragraph",
    "from_bio",
    "repair_prediction",
    "repair_tags",
    "to_bio",
    "validate",
    "__version__",
]
