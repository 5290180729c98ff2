"""
Slow-path constructions: temporal blur of waveforms and encoder states, and
the additive-noise reference used as an unstructured control.
"""

import numpy as np

from slowpath.errors import InvalidArgumentError, require
from slowpath.Signal.kernel import frame_kernel, hann_kernel


def smooth(values, kernel):
    """
    Convolve ``values`` along axis 0 with a symmetric kernel, renormalizing
    each output by the kernel mass that falls inside the sequence.

    Args:
        values: Array of shape (n,) or (n, d)
        kernel: BlurKernel

    Returns:
        Array of the same shape
    """
    weights = kernel.weights
    center = kernel.center_index
    n = values.shape[0]
    mass = np.convolve(np.ones(n), weights, mode="full")[center : center + n]
    if values.ndim == 1:
        total = np.convolve(values, weights, mode="full")[center : center + n]
        return total / mass
    total = np.stack(
        [np.convolve(values[:, j], weights, mode="full")[center : center + n] for j in range(values.shape[1])],
        axis=1,
    )
    return total / mass[:, None]


def blur_waveform(x, window_ms, rescale="rms"):
    """
    Temporally blurred copy of ``x``.

    Args:
        x: Waveform
        window_ms: Hann window duration in milliseconds
        rescale: ``"rms"`` matches the output RMS to the input RMS (skipped for
            silent input); ``"none"`` returns the plain convolution

    Returns:
        Waveform of the same length and sample rate
    """
    if x is None or len(x) == 0:
        raise InvalidArgumentError("cannot blur an empty waveform")
    require(rescale in ("rms", "none"), f"unknown rescale mode {rescale!r}")

    blurred = smooth(x.samples, hann_kernel(window_ms, x.sample_rate))
    if rescale == "rms":
        rms_in = x.rms()
        rms_out = float(np.sqrt(np.mean(blurred**2)))
        if rms_in > 0 and rms_out > 0:
            blurred = blurred * (rms_in / rms_out)
    return x.with_samples(blurred)


def blur_states(H, window_frames):
    """
    Hann-weighted local average of every layer's frame sequence.

    Args:
        H: EncoderStates
        window_frames: Window length in frames (>= 1)

    Returns:
        EncoderStates with the same shape, tagged as the blurred view

    Raises:
        InvalidArgumentError: if the window exceeds twice the frame count
    """
    require(window_frames >= 1, f"window_frames must be >= 1, got {window_frames}")
    require(
        window_frames <= 2 * H.n_frames,
        f"window of {window_frames} frames exceeds twice the sequence length ({H.n_frames})",
    )
    kernel = frame_kernel(window_frames)
    layers = [smooth(layer, kernel) for layer in H.layers]
    return H.with_layers(layers, view="blur")


def noise_reference(x, sigma, seed):
    """
    ``x`` plus seeded Gaussian noise of standard deviation ``sigma``.

    Args:
        x: Waveform
        sigma: Noise standard deviation (>= 0)
        seed: Generator seed

    Returns:
        Waveform; identical to ``x`` when sigma is 0
    """
    require(sigma >= 0, f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return x
    rng = np.random.default_rng(seed)
    return x.with_samples(x.samples + rng.normal(0.0, sigma, size=len(x)))
