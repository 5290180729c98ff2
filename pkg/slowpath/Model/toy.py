"""
Seeded toy audio-language model.

Encoder: log band-power features per frame followed by tanh layers that mix
each frame with its difference to the previous frame. Decoder: a small
pre-norm transformer whose sequence is the audio tokens (projected final
encoder layer) followed by the text tokens, with single-head causal
attention. Small enough for exhaustive recomputation in tests.
"""

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.special import softmax

from slowpath.errors import InvalidArgumentError, require
from slowpath.Model.interface import AudioLanguageModel, EncoderStates, StepOutput
from slowpath.Model.vocab import VOCAB_SIZE

POWER_REF = 1e-4


@dataclass(frozen=True)
class ToyConfig:
    n_encoder_layers: int = 2
    n_decoder_layers: int = 2
    d_model: int = 32
    vocab_size: int = VOCAB_SIZE
    frame_rate: float = 50.0
    n_bands: int = 16
    mlp_ratio: int = 2
    seed: int = 0
    # Text queries may not attend to audio keys.
    audio_masked: bool = False
    # Pool audio frames into this many query tokens before the decoder.
    n_audio_queries: Optional[int] = None

    def __post_init__(self):
        require(self.n_encoder_layers >= 1, "n_encoder_layers must be >= 1")
        require(self.n_decoder_layers >= 1, "n_decoder_layers must be >= 1")
        require(self.d_model >= 2 and self.d_model % 2 == 0, "d_model must be even")
        require(self.vocab_size >= 2, "vocab_size must be >= 2")
        require(self.frame_rate > 0, "frame_rate must be positive")
        require(self.n_audio_queries is None or self.n_audio_queries >= 1, "n_audio_queries must be >= 1")


def init_params(config):
    """Draw the toy weights from a generator seeded with ``config.seed``."""
    rng = np.random.default_rng(config.seed)
    d = config.d_model
    hidden = config.mlp_ratio * d
    params = {}
    for i in range(config.n_encoder_layers):
        fan_in = config.n_bands if i == 0 else d
        params[f"enc{i}.W"] = rng.normal(0.0, 1.0 / math.sqrt(fan_in), (fan_in, d))
        params[f"enc{i}.U"] = rng.normal(0.0, 1.0 / math.sqrt(fan_in), (fan_in, d))
        params[f"enc{i}.b"] = rng.normal(0.0, 0.1, d)
    params["audio.proj"] = rng.normal(0.0, 1.0 / math.sqrt(d), (d, d))
    params["audio.type"] = rng.normal(0.0, 0.5, d)
    params["tok.embed"] = rng.normal(0.0, 1.0, (config.vocab_size, d))
    for layer in range(config.n_decoder_layers):
        for name in ("q", "k", "v", "o"):
            params[f"dec{layer}.{name}"] = rng.normal(0.0, 1.0 / math.sqrt(d), (d, d))
        params[f"dec{layer}.mlp_in"] = rng.normal(0.0, 1.0 / math.sqrt(d), (d, hidden))
        params[f"dec{layer}.mlp_out"] = rng.normal(0.0, 1.0 / math.sqrt(hidden), (hidden, d))
    params["out.W"] = rng.normal(0.0, 1.0 / math.sqrt(d), (d, config.vocab_size))
    return params


def rms_norm(x):
    return x / np.sqrt(np.mean(x**2, axis=-1, keepdims=True) + 1e-12)


def positional_encoding(positions, d):
    """Sinusoidal encodings for integer positions, shape (len(positions), d)."""
    positions = np.asarray(positions, dtype=np.float64)[:, None]
    rates = 1.0 / (10000.0 ** (np.arange(0, d, 2) / d))
    encoding = np.empty((positions.shape[0], d))
    encoding[:, 0::2] = np.sin(positions * rates)
    encoding[:, 1::2] = np.cos(positions * rates)
    return encoding


def band_features(x, frame_rate, n_bands):
    """Log band power of non-overlapping frames, zero for silence."""
    hop = int(round(x.sample_rate / frame_rate))
    n_frames = len(x) // hop
    if n_frames < 1:
        raise InvalidArgumentError(
            f"waveform of {len(x)} samples is shorter than one frame ({hop} samples)"
        )
    frames = x.samples[: n_frames * hop].reshape(n_frames, hop)
    power = np.abs(np.fft.rfft(frames, axis=1)) ** 2 / hop**2
    bands = np.array_split(np.arange(power.shape[1]), n_bands)
    band_power = np.stack([power[:, band].mean(axis=1) for band in bands], axis=1)
    return np.log1p(band_power / POWER_REF)


class ToyAudioLM(AudioLanguageModel):
    """Toy unified audio-language model over the fixed vocabulary."""

    def __init__(self, config=None, params=None):
        self.config = config or ToyConfig()
        self.params = params if params is not None else init_params(self.config)
        for value in self.params.values():
            value.setflags(write=False)
        self.vocab_size = self.config.vocab_size
        self.n_decoder_layers = self.config.n_decoder_layers

    def __repr__(self):
        return f"ToyAudioLM({asdict(self.config)})"

    # encoder

    def encoder_forward(self, features):
        """Layer outputs for a (frames, n_bands) feature matrix."""
        layers = []
        h = features
        for i in range(self.config.n_encoder_layers):
            delta = h - np.vstack([h[:1], h[:-1]])
            h = np.tanh(
                h @ self.params[f"enc{i}.W"] + delta @ self.params[f"enc{i}.U"] + self.params[f"enc{i}.b"]
            )
            layers.append(h)
        return layers

    def _encode(self, x, view):
        features = band_features(x, self.config.frame_rate, self.config.n_bands)
        return EncoderStates(tuple(self.encoder_forward(features)), self.config.frame_rate, view)

    # decoder

    def audio_inputs(self, H):
        memory = H.layers[-1]
        if self.config.n_audio_queries is not None:
            n_queries = min(self.config.n_audio_queries, memory.shape[0])
            memory = np.stack([chunk.mean(axis=0) for chunk in np.array_split(memory, n_queries)])
        d = self.config.d_model
        return memory @ self.params["audio.proj"] + self.params["audio.type"] + positional_encoding(
            np.arange(memory.shape[0]), d
        )

    def text_inputs(self, tokens, start):
        positions = np.arange(start, start + len(tokens))
        return self.params["tok.embed"][np.asarray(tokens, dtype=int)] + positional_encoding(
            positions, self.config.d_model
        )

    def _mlp(self, layer, x):
        p = self.params
        return np.tanh(rms_norm(x) @ p[f"dec{layer}.mlp_in"]) @ p[f"dec{layer}.mlp_out"]

    def _mask(self, n_audio, n_total):
        mask = np.tril(np.ones((n_total, n_total), dtype=bool))
        if self.config.audio_masked:
            mask[n_audio:, :n_audio] = False
        return mask

    def forward(self, H, tokens):
        """
        Full (non-incremental) pass over audio tokens plus ``tokens``.

        Returns:
            (hidden states after the last layer, per-layer K, per-layer V,
             per-layer attention matrices, number of audio tokens)
        """
        p = self.params
        audio = self.audio_inputs(H)
        n_audio = audio.shape[0]
        x = np.vstack([audio, self.text_inputs(tokens, n_audio)])
        mask = self._mask(n_audio, x.shape[0])
        scale = 1.0 / math.sqrt(self.config.d_model)
        keys, values, attentions = [], [], []
        for layer in range(self.config.n_decoder_layers):
            a = rms_norm(x)
            q, k, v = a @ p[f"dec{layer}.q"], a @ p[f"dec{layer}.k"], a @ p[f"dec{layer}.v"]
            scores = np.where(mask, (q @ k.T) * scale, -np.inf)
            weights = softmax(scores, axis=1)
            x = x + (weights @ v) @ p[f"dec{layer}.o"]
            x = x + self._mlp(layer, x)
            keys.append(k)
            values.append(v)
            attentions.append(weights)
        return x, keys, values, attentions, n_audio

    def _readout(self, x):
        return rms_norm(x) @ self.params["out.W"]

    def full_logits(self, H, tokens):
        """
        Logits and audio ratios at every text position, recomputed from scratch.

        Returns:
            (logits of shape (len(tokens), V), ratios of shape (len(tokens), n_decoder_layers))
        """
        x, _, _, attentions, n_audio = self.forward(H, tokens)
        logits = self._readout(x[n_audio:])
        ratios = np.stack([w[n_audio:, :n_audio].sum(axis=1) for w in attentions], axis=1)
        return logits, np.clip(ratios, 0.0, 1.0)

    def raw_attention(self, H, tokens):
        """Per-layer attention matrices over the full sequence, and the audio token count."""
        _, _, _, attentions, n_audio = self.forward(H, tokens)
        return attentions, n_audio

    def _prefill(self, H, prompt):
        x, keys, values, attentions, n_audio = self.forward(H, prompt)
        ratios = np.clip(
            np.stack([w[n_audio:, :n_audio].sum(axis=1) for w in attentions], axis=1), 0.0, 1.0
        )
        pending = StepOutput(self._readout(x[-1]), ratios[-1])
        state = {"keys": keys, "values": values, "n_audio": n_audio}
        return state, pending, ratios.mean(axis=0)

    def _decode(self, cache, last_token):
        p = self.params
        state = cache.state
        n_audio = state["n_audio"]
        position = n_audio + cache.position
        x = self.text_inputs([last_token], position)[0]
        scale = 1.0 / math.sqrt(self.config.d_model)
        ratios = []
        for layer in range(self.config.n_decoder_layers):
            a = rms_norm(x)
            q, k, v = a @ p[f"dec{layer}.q"], a @ p[f"dec{layer}.k"], a @ p[f"dec{layer}.v"]
            keys = np.vstack([state["keys"][layer], k])
            values = np.vstack([state["values"][layer], v])
            state["keys"][layer] = keys
            state["values"][layer] = values
            scores = (keys @ q) * scale
            if self.config.audio_masked:
                scores[:n_audio] = -np.inf
            weights = softmax(scores)
            x = x + (weights @ values) @ p[f"dec{layer}.o"]
            x = x + self._mlp(layer, x)
            ratios.append(weights[:n_audio].sum())
        return StepOutput(self._readout(x), np.clip(ratios, 0.0, 1.0))
