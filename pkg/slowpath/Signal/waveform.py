"""
Mono waveforms and 16-bit PCM WAV I/O.
"""

from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile

from slowpath.errors import InvalidArgumentError, require

PCM_SCALE = 32768.0


@dataclass(frozen=True, eq=False)
class Waveform:
    """
    Mono sample sequence with its sample rate.

    Samples are stored as a read-only float64 array, so a Waveform can be
    shared between threads.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64).reshape(-1)
        require(samples.size > 0, "waveform must contain at least one sample")
        require(np.all(np.isfinite(samples)), "waveform samples must be finite")
        require(
            isinstance(self.sample_rate, (int, np.integer)) and self.sample_rate > 0,
            f"sample_rate must be a positive integer, got {self.sample_rate!r}",
        )
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.size

    @property
    def duration_ms(self):
        return 1000.0 * self.samples.size / self.sample_rate

    def rms(self):
        return float(np.sqrt(np.mean(self.samples**2)))

    def with_samples(self, samples):
        """New waveform at the same sample rate."""
        return Waveform(samples, self.sample_rate)


def read_wav(path):
    """
    Read a mono 16-bit PCM WAV file.

    Args:
        path: WAV file path

    Returns:
        Waveform with samples scaled to [-1, 1)

    Raises:
        InvalidArgumentError: for multichannel or non-16-bit files
    """
    sample_rate, data = wavfile.read(path)
    if data.dtype != np.int16:
        raise InvalidArgumentError(f"{path}: expected 16-bit PCM, got {data.dtype}")
    if data.ndim != 1:
        raise InvalidArgumentError(f"{path}: expected mono audio, got {data.shape[1]} channels")
    return Waveform(data.astype(np.float64) / PCM_SCALE, int(sample_rate))


def write_wav(path, x):
    """
    Write a waveform as mono 16-bit PCM, clipping to the representable range.

    Args:
        path: Output path
        x: Waveform to write
    """
    pcm = np.clip(np.round(x.samples * PCM_SCALE), -PCM_SCALE, PCM_SCALE - 1)
    wavfile.write(path, x.sample_rate, pcm.astype("<i2"))
