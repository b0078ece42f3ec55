"""Modulated string searching: character-class pattern matching with
pluggable per-position scores, computed by a Karatsuba-style convolution."""

from .core import (
    Alphabet,
    CapacityError,
    CharacterClass,
    EmptyClass,
    InputFormatError,
    MatchReport,
    ModSearchError,
    NotInAlphabet,
    NotPowerOfTwo,
    Pattern,
    PatternPosition,
    ScoreOutOfRange,
    Text,
    build_alphabet,
    char_vector,
    mismatches_from_score,
    omega_vector,
)
from .engine import (
    EngineStats,
    Side,
    VectorPolynomial,
    convolve_scores,
    kam_multiply,
    leaf_product,
    pad_to_power_of_two,
    score_alignments,
    search,
)
from .oracle import naive_search, schoolbook_multiply
from .scoring import (
    ClassDistanceIndex,
    ModelKind,
    ScoreModel,
    ScoreTable,
    VerdictMode,
    build_class_distance_index,
    build_score_table,
    cumulative_distance,
    parse_assignment_table,
    psi_bounded,
    psi_exact,
    psi_table,
    psi_truncated,
)

__version__ = "0.1.0"
