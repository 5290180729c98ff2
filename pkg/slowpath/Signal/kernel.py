"""
Hann blur kernels.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import windows

from slowpath.errors import require


@dataclass(frozen=True, eq=False)
class BlurKernel:
    """Normalized, symmetric, non-negative smoothing weights."""

    weights: np.ndarray
    center_index: int

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.weights.size


def odd_length_covering(n):
    """Smallest odd integer >= n (and >= 1)."""
    if n <= 1:
        return 1
    return 2 * math.ceil((n - 1) / 2) + 1


def _normalized(weights):
    weights = weights / weights.sum()
    return BlurKernel(weights, weights.size // 2)


def hann_kernel(window_ms, sample_rate):
    """
    Hann kernel of odd length covering ``window_ms``, summing to 1.

    The symmetric Hann convention is used, so the two end taps are zero and a
    3-tap kernel degenerates to (0, 1, 0).

    Args:
        window_ms: Window duration in milliseconds
        sample_rate: Sample rate in Hz

    Raises:
        InvalidArgumentError: for non-positive window or sample rate
    """
    require(window_ms > 0, f"window_ms must be positive, got {window_ms}")
    require(sample_rate > 0, f"sample_rate must be positive, got {sample_rate}")
    length = odd_length_covering(window_ms * sample_rate / 1000.0)
    return _normalized(windows.hann(length, sym=True))


def frame_kernel(window_frames):
    """
    Hann kernel over encoder frames.

    Frames are coarse, so the zero end taps of the symmetric window are
    dropped: the result is the interior of a Hann window two taps longer,
    strictly positive on its support. ``window_frames=1`` gives [1.0].
    """
    require(window_frames >= 1, f"window_frames must be >= 1, got {window_frames}")
    length = odd_length_covering(window_frames)
    return _normalized(windows.hann(length + 2, sym=True)[1:-1])
