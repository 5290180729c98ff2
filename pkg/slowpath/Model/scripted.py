"""
Table-driven model whose logits and attention ratios are looked up exactly.

Rows are keyed by the audio view and by the tokens generated after the
prompt. A per-view default row makes the table total.

Text format, one row per line, tab separated::

    view    prefix    logits    ratios

``view`` is one of the audio views, optionally suffixed ``@N`` to match only
clips in which the model counted N energy regions (see ``count_threshold``).
``prefix`` is ``-`` for the empty prefix, ``*`` for the view default, or
comma-separated token ids. ``logits`` is either a dense comma-separated list
of vocabulary size, or sparse ``fill|id:value,id:value``. ``ratios`` is a
comma-separated list with one value per decoder layer.
"""

from dataclasses import dataclass, field

import numpy as np

from slowpath.errors import InvalidArgumentError, require
from slowpath.Model.interface import VIEWS, AudioLanguageModel, EncoderStates, StepOutput
from slowpath.Model.vocab import VOCAB_SIZE
from slowpath.Signal.synth import active_regions, short_time_energy


def _check_view(view):
    base, _, count = view.partition("@")
    require(base in VIEWS, f"unknown view {view!r}")
    require(count == "" or count.isdigit(), f"bad event count in view {view!r}")


def sparse_logits(values, fill=0.0, vocab_size=VOCAB_SIZE):
    """Dense logit vector equal to ``fill`` except at the ids in ``values``."""
    logits = np.full(vocab_size, float(fill))
    for token, value in values.items():
        logits[int(token)] = value
    return logits


@dataclass
class ScriptedModelSpec:
    """Lookup table from (view, generated prefix) to a StepOutput."""

    n_decoder_layers: int = 2
    vocab_size: int = VOCAB_SIZE
    rows: dict = field(default_factory=dict)
    defaults: dict = field(default_factory=dict)

    def _output(self, logits, ratios):
        logits = np.asarray(logits, dtype=np.float64)
        require(logits.shape == (self.vocab_size,), f"expected {self.vocab_size} logits, got {logits.shape}")
        ratios = np.broadcast_to(np.asarray(ratios, dtype=np.float64), (self.n_decoder_layers,))
        return StepOutput(logits, ratios)

    def add(self, view, prefix, logits, ratios):
        _check_view(view)
        self.rows[(view, tuple(int(t) for t in prefix))] = self._output(logits, ratios)
        return self

    def set_default(self, view, logits, ratios):
        _check_view(view)
        self.defaults[view] = self._output(logits, ratios)
        return self

    def lookup(self, view, prefix, event_count=None):
        """
        Exact row, then the view default.

        With an ``event_count``, ``view@N`` rows and defaults are tried before
        the plain view at each of the two levels.
        """
        prefix = tuple(prefix)
        views = (view,) if event_count is None else (f"{view}@{event_count}", view)
        for name in views:
            if (name, prefix) in self.rows:
                return self.rows[(name, prefix)]
        for name in views:
            if name in self.defaults:
                return self.defaults[name]
        raise InvalidArgumentError(f"scripted model has no row for view={view!r} prefix={list(prefix)}")


def _parse_logits(text, vocab_size):
    if "|" in text:
        fill, _, pairs = text.partition("|")
        values = {}
        for pair in filter(None, (p.strip() for p in pairs.split(","))):
            token, _, value = pair.partition(":")
            values[int(token)] = float(value)
        return sparse_logits(values, float(fill), vocab_size)
    return np.array([float(v) for v in text.split(",")])


def parse_scripted_spec(text, n_decoder_layers=None, vocab_size=VOCAB_SIZE):
    """
    Parse the scripted-model text format.

    Raises:
        InvalidArgumentError: on malformed rows
    """
    parsed = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = [part.strip() for part in line.split("\t")]
        if len(parts) != 4:
            raise InvalidArgumentError(f"line {number}: expected 4 tab-separated fields")
        view, prefix, logits, ratios = parts
        try:
            ratio_values = [float(r) for r in ratios.split(",")]
            logit_values = _parse_logits(logits, vocab_size)
            prefix_ids = None if prefix == "*" else ([] if prefix == "-" else [int(t) for t in prefix.split(",")])
        except ValueError as e:
            raise InvalidArgumentError(f"line {number}: {e}")
        parsed.append((view, prefix_ids, logit_values, ratio_values))

    if not parsed:
        raise InvalidArgumentError("scripted model spec has no rows")
    layers = n_decoder_layers or len(parsed[0][3])
    spec = ScriptedModelSpec(n_decoder_layers=layers, vocab_size=vocab_size)
    for view, prefix, logits, ratios in parsed:
        if prefix is None:
            spec.set_default(view, logits, ratios)
        else:
            spec.add(view, prefix, logits, ratios)
    return spec


def load_scripted_spec(path):
    with open(path, "r", encoding="utf-8") as f:
        return parse_scripted_spec(f.read())


def summary_features(x, frame_rate):
    """Per-frame (rms, peak, mean, zero-crossing rate)."""
    hop = int(round(x.sample_rate / frame_rate))
    n_frames = len(x) // hop
    if n_frames < 1:
        raise InvalidArgumentError(f"waveform shorter than one frame ({hop} samples)")
    frames = x.samples[: n_frames * hop].reshape(n_frames, hop)
    crossings = np.mean(np.abs(np.diff(np.signbit(frames).astype(np.int8), axis=1)), axis=1)
    return np.stack(
        [np.sqrt(np.mean(frames**2, axis=1)), np.max(np.abs(frames), axis=1), frames.mean(axis=1), crossings],
        axis=1,
    )


class ScriptedAudioLM(AudioLanguageModel):
    """
    Exact oracle backend driven by a ScriptedModelSpec.

    With ``count_threshold`` set, encoding counts the runs of 10 ms frames whose
    energy exceeds it, and lookups prefer the matching ``view@N`` rows.
    """

    def __init__(self, spec, frame_rate=50.0, count_threshold=None):
        require(count_threshold is None or count_threshold > 0, "count_threshold must be positive")
        self.spec = spec
        self.frame_rate = frame_rate
        self.count_threshold = count_threshold
        self.vocab_size = spec.vocab_size
        self.n_decoder_layers = spec.n_decoder_layers

    def _encode(self, x, view):
        features = summary_features(x, self.frame_rate)
        count = None
        if self.count_threshold is not None:
            count = active_regions(short_time_energy(x), self.count_threshold)
        return EncoderStates((features, np.tanh(2.0 * features)), self.frame_rate, view, count)

    def _prefill(self, H, prompt):
        pending = self.spec.lookup(H.view, (), H.event_count)
        return {"generated": [], "events": H.event_count}, pending, pending.attn_audio_ratio_per_layer

    def _decode(self, cache, last_token):
        cache.state["generated"].append(last_token)
        return self.spec.lookup(cache.view, cache.state["generated"], cache.state["events"])
