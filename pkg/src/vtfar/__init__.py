"""Block VT codes that correct far-apart deletions, erasures and bit flips in real time."""
from .bitword import (
    ERASURE,
    ErrorPattern,
    ErrorType,
    ReceivedWord,
    Word,
    apply_pattern,
    apply_pattern_prefix,
    count_far_patterns,
    count_patterns,
    enumerate_far_patterns,
    enumerate_patterns,
    is_far,
    sample_far_pattern,
    sample_pattern,
)
from .decoder import CLEAN, CORRECTED, FAILED, DecodeReport, StreamDecoder, decode, stream_decode
from .errors import BudgetExceeded, CorrectionError
from .farcode import FarCode, FarCodeParams, make_code
from .vt import VTCodebook, best_residue, build_codebook

__version__ = "0.1.0"
