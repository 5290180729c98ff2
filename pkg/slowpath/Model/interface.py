"""
Abstract unified audio-language model interface.

A model is immutable after construction. Per-session state lives in
``CacheHandle`` objects and in ``ForwardCounters`` passed in by the caller, so
one model can serve many sessions on different threads.
"""

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Optional, Tuple

import numpy as np

from slowpath.errors import DecodeStateError, InvalidArgumentError, require
from slowpath.Model.vocab import check_ids

VIEWS = ("original", "blur", "noise")


@dataclass
class ForwardCounters:
    """Exact counts of encoder and decoder forward passes."""

    encoder_forwards: int = 0
    decoder_forwards: int = 0

    def snapshot(self):
        return (self.encoder_forwards, self.decoder_forwards)


@dataclass(frozen=True, eq=False)
class EncoderStates:
    """
    Per-layer sequences of latent frame vectors.

    ``view`` records which audio view produced the states; backends that key
    their outputs on the view (the scripted model) read it, others ignore it.
    ``event_count`` is set only by backends that count energy regions.
    """

    layers: Tuple[np.ndarray, ...]
    frame_rate: float
    view: str = "original"
    event_count: Optional[int] = None

    def __post_init__(self):
        layers = tuple(np.array(layer, dtype=np.float64) for layer in self.layers)
        require(len(layers) >= 1, "encoder states need at least one layer")
        shape = layers[0].shape
        for layer in layers:
            require(layer.ndim == 2, "each layer must be a (frames, dim) array")
            require(layer.shape == shape, "all layers must share frame count and dimension")
            require(np.all(np.isfinite(layer)), "encoder states must be finite")
            layer.setflags(write=False)
        require(shape[0] >= 1, "encoder states need at least one frame")
        require(self.frame_rate > 0, "frame_rate must be positive")
        require(self.view in VIEWS, f"unknown view {self.view!r}")
        object.__setattr__(self, "layers", layers)

    @property
    def n_layers(self):
        return len(self.layers)

    @property
    def n_frames(self):
        return self.layers[0].shape[0]

    @property
    def dim(self):
        return self.layers[0].shape[1]

    def with_layers(self, layers, view=None):
        return EncoderStates(tuple(layers), self.frame_rate, view or self.view, self.event_count)


@dataclass(frozen=True, eq=False)
class StepOutput:
    """Next-token logits and per-decoder-layer audio attention ratios."""

    logits: np.ndarray
    attn_audio_ratio_per_layer: np.ndarray

    def __post_init__(self):
        logits = np.array(self.logits, dtype=np.float64).reshape(-1)
        ratios = np.array(self.attn_audio_ratio_per_layer, dtype=np.float64).reshape(-1)
        require(np.all(np.isfinite(logits)), "logits must be finite")
        require(ratios.size >= 1, "at least one decoder layer ratio is required")
        require(np.all((ratios >= 0) & (ratios <= 1)), "audio ratios must lie in [0, 1]")
        logits.setflags(write=False)
        ratios.setflags(write=False)
        object.__setattr__(self, "logits", logits)
        object.__setattr__(self, "attn_audio_ratio_per_layer", ratios)


_handle_ids = itertools.count(1)


@dataclass(eq=False)
class CacheHandle:
    """
    Incremental decoding state of one branch.

    Owned by exactly one session. ``pending`` holds the output for the next
    position (logits after the last consumed token); ``prefill_ratios`` holds
    the audio ratios averaged over the prompt positions.
    """

    owner: Any
    view: str
    tokens: list
    pending: StepOutput
    prefill_ratios: np.ndarray
    counters: ForwardCounters
    state: Any = None
    handle_id: int = field(default_factory=lambda: next(_handle_ids))
    closed: bool = False

    @property
    def position(self):
        return len(self.tokens)

    def close(self):
        self.closed = True
        self.state = None


class AudioLanguageModel(ABC):
    """
    Base class for audio-language model backends.

    Public methods validate inputs and count forward passes; subclasses
    implement the ``_encode``, ``_prefill`` and ``_decode`` hooks.
    """

    vocab_size: int
    n_decoder_layers: int

    def encode(self, x, counters=None, view="original"):
        """
        Encode a waveform into layered states.

        Args:
            x: Waveform
            counters: ForwardCounters to increment (optional)
            view: Audio view label carried by the returned states

        Returns:
            EncoderStates
        """
        require(view in VIEWS, f"unknown view {view!r}")
        states = self._encode(x, view)
        if counters is not None:
            counters.encoder_forwards += 1
        return states

    def prefill(self, H, prompt, counters=None):
        """
        Run the decoder over the audio and the prompt.

        Args:
            H: EncoderStates
            prompt: Non-empty sequence of token ids
            counters: ForwardCounters charged for this branch

        Returns:
            CacheHandle positioned after the prompt
        """
        prompt = [int(t) for t in prompt]
        if not prompt:
            raise InvalidArgumentError("prompt must not be empty")
        check_ids(prompt, self.vocab_size)
        counters = counters if counters is not None else ForwardCounters()
        state, pending, prefill_ratios = self._prefill(H, prompt)
        counters.decoder_forwards += 1
        return CacheHandle(
            owner=self,
            view=H.view,
            tokens=list(prompt),
            pending=pending,
            prefill_ratios=np.asarray(prefill_ratios, dtype=np.float64),
            counters=counters,
            state=state,
        )

    def decode_step(self, cache, last_token):
        """
        Feed ``last_token`` to a branch and return the output for the next position.

        Raises:
            DecodeStateError: if the cache is closed or belongs to another model
        """
        if not isinstance(cache, CacheHandle) or cache.owner is not self or cache.closed:
            raise DecodeStateError("invalid cache handle for this model")
        last_token = int(last_token)
        check_ids([last_token], self.vocab_size)
        output = self._decode(cache, last_token)
        cache.tokens.append(last_token)
        cache.pending = output
        cache.counters.decoder_forwards += 1
        return output

    def audio_layer_ratios(self, H, prompt, counters=None):
        """
        Per-decoder-layer fraction of attention on audio, averaged over the
        prompt positions of a prefill pass.
        """
        cache = self.prefill(H, prompt, counters)
        ratios = cache.prefill_ratios
        cache.close()
        return ratios

    @abstractmethod
    def _encode(self, x, view):
        ...

    @abstractmethod
    def _prefill(self, H, prompt):
        """Return (backend state, pending StepOutput, prefill ratios)."""

    @abstractmethod
    def _decode(self, cache, last_token):
        """Advance ``cache.state`` by one token and return the new StepOutput."""


def encode(model, x, counters=None, view="original"):
    return model.encode(x, counters, view)


def prefill(model, H, prompt, counters=None):
    return model.prefill(H, prompt, counters)


def decode_step(model, cache, last_token):
    return model.decode_step(cache, last_token)


def audio_layer_ratios(model, H, prompt, counters=None):
    return model.audio_layer_ratios(H, prompt, counters)
