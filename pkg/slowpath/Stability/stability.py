"""
Self-normalized stability of encoder trajectories and its mapping to the
blur window and the update scale.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.special import softmax

from slowpath.errors import InvalidArgumentError, require


@dataclass(frozen=True)
class LayerStability:
    M: float
    F: float
    S: float
    w: float


@dataclass(frozen=True)
class StabilityReport:
    """Per-layer statistics, the pooled score and the derived (W, lambda)."""

    per_layer: Tuple[LayerStability, ...]
    pooled_S: float
    window_ms: float
    lam: float

    def to_record(self):
        """Flat ``key=value`` fields, numbers with 9 significant digits."""
        fields = [
            f"S={self.pooled_S:.9g}",
            f"W_ms={self.window_ms:.9g}",
            f"lambda={self.lam:.9g}",
        ]
        for i, layer in enumerate(self.per_layer):
            fields.append(f"layer{i}=M:{layer.M:.9g},F:{layer.F:.9g},S:{layer.S:.9g},w:{layer.w:.9g}")
        return "\t".join(fields)


def layer_stats(layer_states):
    """
    Average magnitude and temporal flux of one layer.

    Args:
        layer_states: Array of shape (frames, dim) with at least 2 frames

    Returns:
        (M, F): mean Euclidean norm over frames and mean norm of consecutive
        differences over the frames - 1 pairs
    """
    states = np.asarray(layer_states, dtype=np.float64)
    require(states.ndim == 2, "layer states must be a (frames, dim) array")
    require(states.shape[0] >= 2, "temporal flux needs at least two frames")
    M = float(np.mean(np.linalg.norm(states, axis=1)))
    F = float(np.mean(np.linalg.norm(np.diff(states, axis=0), axis=1)))
    return M, F


def layer_stability(M, F, epsilon):
    """M / (M + F + epsilon), in [0, 1)."""
    if M < 0 or F < 0:
        raise InvalidArgumentError(f"M and F must be non-negative, got M={M}, F={F}")
    require(epsilon > 0, f"epsilon must be positive, got {epsilon}")
    return M / (M + F + epsilon)


def pool_stability(S_layers, r_layers, tau):
    """
    Audio-attention softmax pooling of layer stabilities.

    Returns:
        (pooled_S, weights) with weights = softmax(tau * r)
    """
    S_layers = np.asarray(S_layers, dtype=np.float64)
    r_layers = np.asarray(r_layers, dtype=np.float64)
    require(S_layers.size > 0, "no layers to pool")
    require(S_layers.shape == r_layers.shape, "S and r must have the same length")
    require(np.isfinite(tau), "tau must be finite")
    weights = softmax(tau * r_layers)
    pooled = float(np.dot(weights, S_layers))
    pooled = min(max(pooled, float(S_layers.min())), float(S_layers.max()))
    return pooled, weights


def _interpolate(S, low, high, name):
    if not 0.0 <= S <= 1.0:
        raise InvalidArgumentError(f"stability score must lie in [0, 1], got {S}")
    require(low <= high, f"{name} bounds are out of order: {low} > {high}")
    value = low + (high - low) * S
    return min(max(value, low), high)


def map_window(S, W_min, W_max):
    """Blur window in ms, linear in S."""
    return _interpolate(S, W_min, W_max, "window")


def map_scale(S, lambda_min, lambda_max):
    """Update scale, linear in S."""
    return _interpolate(S, lambda_min, lambda_max, "scale")


def match_layers(n_encoder_layers, decoder_ratios):
    """
    Decoder ratio for each encoder layer by normalized depth.

    Encoder layer i takes the decoder layer at round(i * (n_dec - 1) / (n_enc - 1));
    a single encoder layer takes the last decoder layer.
    """
    decoder_ratios = np.asarray(decoder_ratios, dtype=np.float64)
    n_dec = decoder_ratios.size
    require(n_dec >= 1, "no decoder ratios")
    if n_encoder_layers == 1:
        return decoder_ratios[-1:].copy()
    depth = np.arange(n_encoder_layers) / (n_encoder_layers - 1)
    index = np.floor(depth * (n_dec - 1) + 0.5).astype(int)
    return decoder_ratios[index]


def compute_stability(H, decoder_ratios, config):
    """
    Stability report for one example, computed before generation.

    Args:
        H: EncoderStates of the original audio
        decoder_ratios: Per-decoder-layer audio ratios of the original prefill
        config: DecodeConfig

    Returns:
        StabilityReport
    """
    stats = [layer_stats(layer) for layer in H.layers]
    S_layers = [layer_stability(M, F, config.epsilon) for M, F in stats]
    r_layers = match_layers(H.n_layers, decoder_ratios)
    pooled, weights = pool_stability(S_layers, r_layers, config.tau)
    per_layer = tuple(
        LayerStability(M, F, S, float(w)) for (M, F), S, w in zip(stats, S_layers, weights)
    )
    return StabilityReport(
        per_layer=per_layer,
        pooled_S=pooled,
        window_ms=map_window(pooled, config.W_min_ms, config.W_max_ms),
        lam=map_scale(pooled, config.lambda_min, config.lambda_max),
    )
