"""
Step-wise gated contrastive logit update.

All operators are pure functions of numpy vectors. Top-K selections break
ties by ascending token id.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import entr, softmax

from slowpath.errors import InvalidArgumentError, require


def _vector(values):
    vector = np.asarray(values, dtype=np.float64).reshape(-1)
    require(np.all(np.isfinite(vector)), "logits must be finite")
    return vector


def top_k(z, k):
    """Ids of the ``k`` largest entries, ties broken by ascending id."""
    z = _vector(z)
    require(1 <= k <= z.size, f"K={k} must lie in [1, {z.size}]")
    return np.argsort(-z, kind="stable")[:k]


def rectified_diff(z, z_blur):
    """Elementwise max(z - z_blur, 0)."""
    z, z_blur = _vector(z), _vector(z_blur)
    if z.shape != z_blur.shape:
        raise InvalidArgumentError(f"logit length mismatch: {z.size} vs {z_blur.size}")
    return np.maximum(z - z_blur, 0.0)


def candidate_set(z, z_blur, K_orig, K_blur):
    """Union of the top-K_orig ids of z and the top-K_blur ids of z_blur, sorted."""
    return tuple(sorted(set(top_k(z, K_orig).tolist()) | set(top_k(z_blur, K_blur).tolist())))


def audio_reliance(ratios_per_layer, L_attn):
    """Mean audio ratio over the last min(L_attn, n_layers) decoder layers."""
    ratios = np.asarray(ratios_per_layer, dtype=np.float64).reshape(-1)
    require(ratios.size >= 1, "at least one decoder layer is required")
    require(L_attn >= 1, "L_attn must be >= 1")
    value = float(np.mean(ratios[-min(L_attn, ratios.size) :]))
    return min(max(value, 0.0), 1.0)


def topk_entropy(z, K_ent):
    """
    Normalized entropy of the renormalized top-K_ent probabilities of softmax(z).

    Returns:
        Value in [0, 1]: 0 for a single dominant token, 1 for uniform logits
    """
    z = _vector(z)
    require(K_ent >= 2, f"K_ent must be >= 2, got {K_ent}")
    if K_ent > z.size:
        raise InvalidArgumentError(f"K_ent={K_ent} exceeds vocabulary size {z.size}")
    p = softmax(z)
    top = np.sort(p)[::-1][:K_ent]
    top = top / top.sum()
    value = float(entr(top).sum() / math.log(K_ent))
    return min(max(value, 0.0), 1.0)


def gate(r_t, entropy_hat, gamma_gate, alpha):
    """min(gamma_gate * r_t * entropy_hat ** alpha, 1); alpha = 0 disables the entropy factor."""
    if min(r_t, entropy_hat, gamma_gate, alpha) < 0:
        raise InvalidArgumentError("gate inputs must be non-negative")
    factor = 1.0 if alpha == 0 else entropy_hat**alpha
    return min(gamma_gate * r_t * factor, 1.0)


def apply_update(z, d_plus, omega, lam, g_t):
    """z + lam * g_t * d_plus on the candidate ids, z elsewhere."""
    adjusted = _vector(z).copy()
    omega = np.asarray(omega, dtype=int)
    if omega.size:
        adjusted[omega] += lam * g_t * np.asarray(d_plus, dtype=np.float64)[omega]
    return adjusted


def signed_update(z, d, omega, lam, g_t):
    """As ``apply_update`` but with the unrectified difference."""
    return apply_update(z, d, omega, lam, g_t)


@dataclass(frozen=True)
class FusedStep:
    """Adjusted logits of one step with the quantities that produced them."""

    adjusted: np.ndarray
    r_t: float
    entropy_hat: float
    gate: float
    candidate_ids: tuple
    applied_bias: dict


def fuse_step(z, z_blur, ratios_per_layer, lam, config):
    """
    Apply the configured strategy to one step.

    Args:
        z: Original-view logits
        z_blur: Slow-path logits (ignored for the baseline strategy)
        ratios_per_layer: Decoder audio ratios of the original view
        lam: Update scale from the stability report
        config: DecodeConfig

    Returns:
        FusedStep
    """
    z = _vector(z)
    r_t = audio_reliance(ratios_per_layer, config.L_attn)
    entropy_hat = topk_entropy(z, config.K_ent)
    if config.strategy == "baseline":
        return FusedStep(z, r_t, entropy_hat, 0.0, (), {})

    z_blur = _vector(z_blur)
    omega = candidate_set(z, z_blur, config.K_orig, config.K_blur)
    if config.strategy == "tcd_no_gate":
        g_t = 1.0
    else:
        g_t = gate(r_t, entropy_hat, config.gamma_gate, config.alpha)

    if config.strategy == "tcd_signed":
        adjusted = signed_update(z, z - z_blur, omega, lam, g_t)
    else:
        adjusted = apply_update(z, rectified_diff(z, z_blur), omega, lam, g_t)

    bias = {int(j): float(adjusted[j] - z[j]) for j in omega}
    return FusedStep(adjusted, r_t, entropy_hat, g_t, omega, bias)
