from slowpath.Fusion.fusion import (
    FusedStep,
    apply_update,
    audio_reliance,
    candidate_set,
    fuse_step,
    gate,
    rectified_diff,
    signed_update,
    topk_entropy,
)
from slowpath.Fusion.trace import GateTrace, parse_trace_line, read_trace_file, write_trace_file
