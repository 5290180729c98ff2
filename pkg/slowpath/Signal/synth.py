"""
Deterministic test audio: tone-burst events over a Gaussian noise floor.

Script text format::

    duration_ms=1000
    noise_floor=0.01
    seed=7
    sample_rate=16000
    100, 80, ring
    400, 80, ring

Header lines are ``key=value``; every other non-comment line is one event
``onset_ms, length_ms, class``.
"""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from slowpath.errors import InvalidArgumentError, require
from slowpath.Signal.waveform import Waveform

EVENT_FREQUENCIES_HZ = {
    "ring": 1000.0,
    "beep": 2000.0,
    "knock": 400.0,
    "chirp": 3000.0,
}
EVENT_AMPLITUDE = 0.5
RAMP_MS = 5.0


@dataclass(frozen=True)
class Event:
    onset_ms: float
    length_ms: float
    event_class: str


@dataclass(frozen=True)
class EventScript:
    """A timed list of tone-burst events."""

    duration_ms: float
    events: Tuple[Event, ...] = field(default_factory=tuple)
    noise_floor: float = 0.0
    seed: int = 0
    sample_rate: int = 16000

    def __post_init__(self):
        events = tuple(e if isinstance(e, Event) else Event(float(e[0]), float(e[1]), str(e[2])) for e in self.events)
        object.__setattr__(self, "events", events)
        require(self.duration_ms > 0, "duration_ms must be positive")
        require(self.noise_floor >= 0, "noise_floor must be non-negative")
        require(self.sample_rate > 0, "sample_rate must be positive")
        previous = None
        for event in events:
            require(event.length_ms > 0, f"event at {event.onset_ms} ms has non-positive length")
            require(event.onset_ms >= 0, f"event onset {event.onset_ms} ms is negative")
            require(
                event.onset_ms + event.length_ms <= self.duration_ms,
                f"event at {event.onset_ms} ms does not fit in {self.duration_ms} ms",
            )
            require(
                event.event_class in EVENT_FREQUENCIES_HZ,
                f"unknown event class {event.event_class!r}",
            )
            if previous is not None:
                require(event.onset_ms > previous.onset_ms, "event onsets must be strictly increasing")
                if event.onset_ms < previous.onset_ms + previous.length_ms:
                    raise InvalidArgumentError(
                        f"event at {event.onset_ms} ms overlaps the event at {previous.onset_ms} ms"
                    )
            previous = event

    def count(self, event_class):
        return sum(1 for e in self.events if e.event_class == event_class)


def tone_burst(frequency_hz, n_samples, sample_rate, amplitude=EVENT_AMPLITUDE):
    """Sine burst with raised-cosine onset and offset ramps."""
    t = np.arange(n_samples) / sample_rate
    burst = amplitude * np.sin(2 * np.pi * frequency_hz * t)
    ramp = min(int(round(RAMP_MS * sample_rate / 1000.0)), n_samples // 2)
    if ramp > 0:
        envelope = 0.5 - 0.5 * np.cos(np.pi * np.arange(ramp) / ramp)
        burst[:ramp] *= envelope
        burst[n_samples - ramp :] *= envelope[::-1]
    return burst


def synth_event_audio(script):
    """
    Render an EventScript.

    Args:
        script: EventScript

    Returns:
        Waveform; identical for identical scripts
    """
    sr = script.sample_rate
    n = int(round(script.duration_ms * sr / 1000.0))
    rng = np.random.default_rng(script.seed)
    samples = rng.normal(0.0, 1.0, size=n) * script.noise_floor
    for event in script.events:
        start = int(round(event.onset_ms * sr / 1000.0))
        length = min(int(round(event.length_ms * sr / 1000.0)), n - start)
        samples[start : start + length] += tone_burst(
            EVENT_FREQUENCIES_HZ[event.event_class], length, sr
        )
    return Waveform(samples, sr)


def short_time_energy(x, frame_ms=10.0):
    """Mean squared amplitude over consecutive non-overlapping frames."""
    hop = max(1, int(round(frame_ms * x.sample_rate / 1000.0)))
    n_frames = len(x) // hop
    require(n_frames >= 1, "waveform shorter than one energy frame")
    frames = x.samples[: n_frames * hop].reshape(n_frames, hop)
    return np.mean(frames**2, axis=1)


def active_regions(energy, threshold):
    """Number of maximal runs of frames whose energy exceeds ``threshold``."""
    above = np.concatenate([[False], energy > threshold, [False]])
    return int(np.count_nonzero(np.diff(above.astype(np.int8)) == 1))


_HEADER_KEYS = {"duration_ms": float, "noise_floor": float, "seed": int, "sample_rate": int}


def parse_event_script(text):
    """
    Parse the script text format.

    Raises:
        InvalidArgumentError: on malformed lines or missing duration
    """
    header = {}
    events = []
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _HEADER_KEYS:
                raise InvalidArgumentError(f"line {number}: unknown script key {key!r}")
            try:
                header[key] = _HEADER_KEYS[key](value)
            except ValueError:
                raise InvalidArgumentError(f"line {number}: bad value for {key}: {value!r}")
            continue
        parts = [part.strip() for part in line.split(",")]
        if len(parts) != 3:
            raise InvalidArgumentError(f"line {number}: expected 'onset_ms, length_ms, class'")
        try:
            events.append(Event(float(parts[0]), float(parts[1]), parts[2]))
        except ValueError:
            raise InvalidArgumentError(f"line {number}: bad event timing {line!r}")
    if "duration_ms" not in header:
        raise InvalidArgumentError("script is missing duration_ms")
    return EventScript(events=tuple(events), **header)


def format_event_script(script):
    """Render an EventScript in the script text format."""
    lines = [
        f"duration_ms={script.duration_ms!r}",
        f"noise_floor={script.noise_floor!r}",
        f"seed={script.seed}",
        f"sample_rate={script.sample_rate}",
    ]
    for event in script.events:
        lines.append(f"{event.onset_ms!r}, {event.length_ms!r}, {event.event_class}")
    return "\n".join(lines) + "\n"
