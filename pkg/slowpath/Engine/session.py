"""
Dual-branch decoding sessions.

A session keeps two caches over the same decoder: the original audio and
its slow-path view. At every step both caches expose their pending logits,
the fused choice is made, and both caches consume that same token.
"""

import math
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from slowpath.errors import DecodeStateError, InvalidArgumentError, require
from slowpath.Fusion.fusion import fuse_step
from slowpath.Fusion.trace import GateTrace
from slowpath.Logging.logger import info
from slowpath.Meta.config import serialize_config
from slowpath.Model.interface import CacheHandle, ForwardCounters
from slowpath.Model.vocab import EOS, detokenize, tokenize
from slowpath.Signal.blur import blur_states, blur_waveform, noise_reference
from slowpath.Stability.stability import StabilityReport, compute_stability


@dataclass
class Session:
    model: object
    config: object
    original: CacheHandle
    slowpath: Optional[CacheHandle]
    stability: Optional[StabilityReport]
    counters: ForwardCounters
    stop_token: Optional[int] = EOS
    generated: List[int] = field(default_factory=list)
    traces: List[GateTrace] = field(default_factory=list)
    finished: bool = False

    @property
    def lam(self):
        return self.stability.lam if self.stability is not None else 0.0

    def close(self):
        self.original.close()
        if self.slowpath is not None:
            self.slowpath.close()


@dataclass
class Transcript:
    tokens: List[int]
    text: str
    traces: List[GateTrace]
    stability: Optional[StabilityReport]
    counters: tuple
    strategy: str
    stop_token: Optional[int]
    finished: bool
    prefill_seconds: float = 0.0
    step_seconds: List[float] = field(default_factory=list)
    header: str = ""

    @property
    def answer(self):
        """Generated tokens before the stop token."""
        if self.stop_token is not None and self.stop_token in self.tokens:
            return self.tokens[: self.tokens.index(self.stop_token)]
        return list(self.tokens)

    @property
    def mean_step_seconds(self):
        return float(np.mean(self.step_seconds)) if self.step_seconds else 0.0

    @property
    def gate_activation_rate(self):
        if not self.traces:
            return 0.0
        return sum(1 for t in self.traces if t.gate > 0) / len(self.traces)

    @property
    def mean_candidates(self):
        if not self.traces:
            return 0.0
        return float(np.mean([len(t.candidate_ids) for t in self.traces]))

    def to_record(self, timings=False):
        """Flat ``key=value`` summary; timings are excluded unless asked for."""
        fields = [
            f"strategy={self.strategy}",
            f"tokens={','.join(str(t) for t in self.tokens) or '-'}",
            f"text={self.text or '-'}",
            f"steps={len(self.tokens)}",
            f"finished={'yes' if self.finished else 'no'}",
            f"encoder_forwards={self.counters[0]}",
            f"decoder_forwards={self.counters[1]}",
        ]
        if timings:
            fields.append(f"prefill_s={self.prefill_seconds:.6f}")
            fields.append(f"step_mean_s={self.mean_step_seconds:.6f}")
        return "\t".join(fields)

    def trace_lines(self):
        """Session header followed by one record per step."""
        return [self.header] + [t.to_record() for t in self.traces]


def session_header(config, stability):
    """One ``session`` record echoing the configuration and the stability report."""
    fields = ["session"] + serialize_config(config).splitlines()
    fields.append(stability.to_record() if stability is not None else "S=-")
    return "\t".join(fields)


def slow_path_frames(window_ms, frame_rate):
    return max(1, math.ceil(window_ms * frame_rate / 1000.0))


def _as_ids(prompt):
    return tokenize(prompt) if isinstance(prompt, str) else [int(t) for t in prompt]


def start_session(model, x, prompt, config, stop_token=EOS):
    """
    Encode, estimate stability, build the slow path and prefill both branches.

    Args:
        model: AudioLanguageModel
        x: Waveform
        prompt: Token ids or a whitespace-separated prompt string
        config: DecodeConfig
        stop_token: Token that finishes the session, or None to never stop

    Returns:
        Session positioned after the prompt on both branches

    Raises:
        InvalidArgumentError: if a slow-path strategy gets fewer than two encoder frames
    """
    prompt = _as_ids(prompt)
    counters = ForwardCounters()
    H = model.encode(x, counters)
    if config.uses_slow_path and H.n_frames < 2:
        raise InvalidArgumentError(
            f"strategy {config.strategy} needs at least 2 encoder frames to measure stability, "
            f"got {H.n_frames} from {x.duration_ms:.0f} ms of audio"
        )
    original = model.prefill(H, prompt, counters)

    if not config.uses_slow_path:
        return Session(model, config, original, None, None, counters, stop_token)

    stability = compute_stability(H, original.prefill_ratios, config)
    if config.strategy == "tcd_noise_ref":
        reference = noise_reference(x, config.noise_sigma, config.seed)
        H_slow = model.encode(reference, counters, view="noise")
    elif config.slow_path == "states":
        H_slow = blur_states(H, slow_path_frames(stability.window_ms, H.frame_rate))
    else:
        blurred = blur_waveform(x, stability.window_ms, config.rescale)
        H_slow = model.encode(blurred, counters, view="blur")
    slowpath = model.prefill(H_slow, prompt, counters)
    return Session(model, config, original, slowpath, stability, counters, stop_token)


def step(session):
    """
    Decode one token.

    Returns:
        (chosen token, GateTrace)

    Raises:
        DecodeStateError: if the session already finished
    """
    if session.finished:
        raise DecodeStateError("session already reached its stop token")

    output = session.original.pending
    z_blur = session.slowpath.pending.logits if session.slowpath is not None else None
    fused = fuse_step(output.logits, z_blur, output.attn_audio_ratio_per_layer, session.lam, session.config)
    chosen = int(np.argmax(fused.adjusted))
    trace = GateTrace(
        step_index=len(session.generated),
        r_t=fused.r_t,
        entropy_hat=fused.entropy_hat,
        gate=fused.gate,
        candidate_ids=tuple(int(j) for j in fused.candidate_ids),
        applied_bias=fused.applied_bias,
        chosen_token=chosen,
        baseline_token=int(np.argmax(output.logits)),
    )

    session.model.decode_step(session.original, chosen)
    if session.slowpath is not None:
        session.model.decode_step(session.slowpath, chosen)
    session.generated.append(chosen)
    session.traces.append(trace)
    if session.stop_token is not None and chosen == session.stop_token:
        session.finished = True
    return chosen, trace


def generate(model, x, prompt, config, max_tokens, stop_token=EOS):
    """
    Greedy decoding until ``stop_token`` or ``max_tokens``.

    Returns:
        Transcript
    """
    require(max_tokens >= 1, f"max_tokens must be >= 1, got {max_tokens}")
    start = time.perf_counter()
    session = start_session(model, x, prompt, config, stop_token)
    prefill_seconds = time.perf_counter() - start
    if session.stability is not None:
        info(
            f"Session {config.strategy}: S={session.stability.pooled_S:.4f} "
            f"W={session.stability.window_ms:.2f}ms lambda={session.stability.lam:.4f}"
        )

    step_seconds = []
    while not session.finished and len(session.generated) < max_tokens:
        start = time.perf_counter()
        step(session)
        step_seconds.append(time.perf_counter() - start)
    session.close()

    return Transcript(
        tokens=list(session.generated),
        text=detokenize(session.generated),
        traces=list(session.traces),
        stability=session.stability,
        counters=session.counters.snapshot(),
        strategy=config.strategy,
        stop_token=stop_token,
        finished=session.finished,
        prefill_seconds=prefill_seconds,
        step_seconds=step_seconds,
        header=session_header(config, session.stability),
    )


@dataclass(frozen=True)
class ApplicabilityReport:
    """How much a model lets the gate act on one input."""

    steps: int
    mean_reliance: float
    mean_gate: float
    gate_activation_rate: float


def applicability_probe(model, x, prompt, config, max_tokens=16):
    """
    Decode once and summarize audio reliance and gate activity.

    Bottlenecked architectures show near-zero reliance and a gate that
    rarely opens.
    """
    transcript = generate(model, x, prompt, config, max_tokens)
    traces = transcript.traces
    return ApplicabilityReport(
        steps=len(traces),
        mean_reliance=float(np.mean([t.r_t for t in traces])),
        mean_gate=float(np.mean([t.gate for t in traces])),
        gate_activation_rate=transcript.gate_activation_rate,
    )
