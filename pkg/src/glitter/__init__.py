"""Per-token surprisal annotation with heat-map rendering.

Text goes in, every token comes back with a probability, a surprisal
value, a rank among the model's alternatives and one of sixteen
predictability buckets; long stretches of highly predictable words are
flagged as formulaic. Probabilities come from pluggable backends: local
n-gram models, precomputed score dumps or remote completions endpoints.

>>> from glitter import glitter
>>> from glitter.demo import demo_backend, sample_text
>>> doc = glitter(sample_text(), demo_backend())
>>> doc.stats.formulaic_coverage > 0
True
"""

from .backends import (
    Backend,
    BackendCapabilities,
    Candidate,
    HttpLogprobBackend,
    NgramBackend,
    NgramModel,
    PrecomputedBackend,
    ScoreResult,
    Token,
    load_model,
    save_model,
    train_ngram,
)
from .config import BackendSpec, GlitterConfig, ServiceSettings, build_registry, load_settings
from .core import (
    DEFAULT_BUCKET_BOUNDS,
    NUM_BUCKETS,
    DocumentStats,
    FormulaicRun,
    Marker,
    TokenDistribution,
    bucket_of_probability,
    bucket_of_rank,
    chain_rule_probability,
    detect_formulaic_runs,
    document_stats,
    entropy,
    surprisal,
)
from .errors import GlitterError
from .palette import Palette, default_palette, load_palette
from .pipeline import (
    AnnotatedDocument,
    PositionAnnotation,
    Provenance,
    WordAnnotation,
    Window,
    dump_records,
    glitter,
    window_plan,
)
from .render import to_ansi, to_html, to_structured
from .segmentation import align_tokens, group_words, normalize

__version__ = "0.1.0"

__all__ = [
    "Backend",
    "BackendCapabilities",
    "Candidate",
    "HttpLogprobBackend",
    "NgramBackend",
    "NgramModel",
    "PrecomputedBackend",
    "ScoreResult",
    "Token",
    "load_model",
    "save_model",
    "train_ngram",
    "BackendSpec",
    "GlitterConfig",
    "ServiceSettings",
    "build_registry",
    "load_settings",
    "DEFAULT_BUCKET_BOUNDS",
    "NUM_BUCKETS",
    "DocumentStats",
    "FormulaicRun",
    "Marker",
    "TokenDistribution",
    "bucket_of_probability",
    "bucket_of_rank",
    "chain_rule_probability",
    "detect_formulaic_runs",
    "document_stats",
    "entropy",
    "surprisal",
    "GlitterError",
    "Palette",
    "default_palette",
    "load_palette",
    "AnnotatedDocument",
    "PositionAnnotation",
    "Provenance",
    "WordAnnotation",
    "Window",
    "dump_records",
    "glitter",
    "window_plan",
    "to_ansi",
    "to_html",
    "to_structured",
    "align_tokens",
    "group_words",
    "normalize",
    "__version__",
]
