"""Path signatures, log-signatures and exact path gradients in the word basis.

The library computes signature coefficients of piecewise-linear paths over
arbitrary finite word sets (truncated, anisotropic, graph-induced, Lyndon,
sparse lead-lag or custom), their Lyndon-basis log-signatures, windowed
signatures, and exact reverse-mode gradients that store only the terminal
signature.  A scikit-learn estimator layer and a CLI sit on top of the
functional API.
"""

from .backward import (
    GradBatch,
    ReconstructionState,
    exp_coeff_grad,
    increment_to_sample_grads,
    left_step,
    right_step,
    signature_backward,
)
from .errors import (
    CapacityError,
    CorruptWordError,
    DomainError,
    InvalidLetterError,
    ShapeError,
    SigkitError,
    UnsupportedWordSetError,
    WindowError,
    WordRangeError,
)
from .estimators import (
    LogSignatureFeatures,
    SignatureFeatures,
    WindowedSignatureFeatures,
)
from .logsig import (
    LogCoefficientBatch,
    logsignature_backward,
    logsignature_forward,
    tensor_exp,
    tensor_log,
)
from .sigcore import (
    CoefficientBatch,
    PathBatch,
    WindowSpec,
    as_path_batch,
    chen_concat,
    horner_update,
    segment_exp_coeff,
    signature_forward,
    signature_inverse,
    signature_windows,
)
from .transforms import LeadLagBatch, lead_lag, time_reverse
from .words import (
    Alphabet,
    PackedWord,
    Word,
    concat_code,
    decode_word,
    encode_word,
    max_word_length,
    pack_letters,
    prefix_code,
    suffix_code,
    unpack_letters,
    word_from_string,
    word_to_string,
)
from .wordsets import (
    AnisotropyWeights,
    GraphSpec,
    WordSet,
    build_anisotropic,
    build_custom,
    build_graph,
    build_leadlag_sparse,
    build_lyndon,
    build_truncated,
    wordset_from_descriptor,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "AnisotropyWeights",
    "CapacityError",
    "CoefficientBatch",
    "CorruptWordError",
    "DomainError",
    "GradBatch",
    "GraphSpec",
    "InvalidLetterError",
    "LeadLagBatch",
    "LogCoefficientBatch",
    "LogSignatureFeatures",
    "PackedWord",
    "PathBatch",
    "ReconstructionState",
    "ShapeError",
    "SignatureFeatures",
    "SigkitError",
    "UnsupportedWordSetError",
    "WindowSpec",
    "WindowedSignatureFeatures",
    "Word",
    "WordRangeError",
    "WordSet",
    "as_path_batch",
    "build_anisotropic",
    "build_custom",
    "build_graph",
    "build_leadlag_sparse",
    "build_lyndon",
    "build_truncated",
    "chen_concat",
    "concat_code",
    "decode_word",
    "encode_word",
    "exp_coeff_grad",
    "horner_update",
    "increment_to_sample_grads",
    "lead_lag",
    "left_step",
    "logsignature_backward",
    "logsignature_forward",
    "max_word_length",
    "pack_letters",
    "prefix_code",
    "right_step",
    "segment_exp_coeff",
    "signature_backward",
    "signature_forward",
    "signature_inverse",
    "signature_windows",
    "suffix_code",
    "tensor_exp",
    "tensor_log",
    "time_reverse",
    "unpack_letters",
    "word_from_string",
    "word_to_string",
    "wordset_from_descriptor",
]
