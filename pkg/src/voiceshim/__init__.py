"""voiceshim: adapt natural text-editing voice commands to a fixed-syntax
legacy voice interface, with a desk-scale simulator, synthetic dataset
generator, and evaluation harness."""

__version__ = "0.1.0"

from .grammar import (  # noqa: F401
    Command,
    OperationKind,
    ParseError,
    parse_canonical,
    serialize_canonical,
    template_of,
)
from .lexicon import NormalizerLexicon, RepairCategory, default_lexicon  # noqa: F401
from .normalizer import (  # noqa: F401
    Clarify,
    Corrected,
    PassThrough,
    RuleBackend,
    SelectionContext,
    Suggest,
    apply_clarification,
    normalize,
)
from .segmenter import SegmenterConfig, SegmenterMode  # noqa: F401
from .session import Session, open_session  # noqa: F401
from .dataset import DatasetSample, DistributionSpec, generate  # noqa: F401
from .evaluation import (  # noqa: F401
    evaluate,
    exact_match,
    golden_replay_corpus,
    replay_compare,
    rouge_l,
)

__all__ = [
    "Command", "OperationKind", "ParseError", "parse_canonical",
    "serialize_canonical", "template_of",
    "NormalizerLexicon", "RepairCategory", "default_lexicon",
    "Clarify", "Corrected", "PassThrough", "RuleBackend", "SelectionContext",
    "Suggest", "apply_clarification", "normalize",
    "SegmenterConfig", "SegmenterMode",
    "Session", "open_session",
    "DatasetSample", "DistributionSpec", "generate",
    "evaluate", "exact_match", "golden_replay_corpus", "replay_compare",
    "rouge_l",
]
