"""
Latency, pass-count and memory profile of baseline against a slow-path strategy.
"""

import time
import tracemalloc
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from slowpath.errors import require
from slowpath.Engine.session import start_session, step
from slowpath.TUI.table import Table


@dataclass
class ProfileRun:
    strategy: str
    prefill_seconds: float
    step_seconds: List[float] = field(default_factory=list)
    prefill_passes: tuple = (0, 0)
    decode_passes: tuple = (0, 0)
    peak_bytes: int = 0

    @property
    def mean_step_seconds(self):
        return float(np.mean(self.step_seconds))

    @property
    def tokens_per_second(self):
        total = sum(self.step_seconds)
        return len(self.step_seconds) / total if total > 0 else float("inf")


def _ratio(numerator, denominator):
    return numerator / denominator if denominator else float("nan")


@dataclass
class ProfileReport:
    n_steps: int
    runs: Dict[str, ProfileRun]

    @property
    def baseline(self):
        return self.runs["baseline"]

    @property
    def contrast(self) -> Optional[ProfileRun]:
        """The slow-path run, if one was profiled."""
        for name, run in self.runs.items():
            if name != "baseline":
                return run
        return None

    def ratios(self):
        """Slow-path over baseline ratios, or an empty dict for a baseline-only profile."""
        run = self.contrast
        if run is None:
            return {}
        base = self.baseline
        return {
            "prefill_encoder_passes": _ratio(run.prefill_passes[0], base.prefill_passes[0]),
            "prefill_decoder_passes": _ratio(run.prefill_passes[1], base.prefill_passes[1]),
            "decode_passes": _ratio(run.decode_passes[1], base.decode_passes[1]),
            "prefill_seconds": _ratio(run.prefill_seconds, base.prefill_seconds),
            "step_seconds": _ratio(run.mean_step_seconds, base.mean_step_seconds),
            "peak_memory": _ratio(run.peak_bytes, base.peak_bytes),
        }

    def render(self):
        runs = list(self.runs.values())
        table = Table(
            ["metric"] + [run.strategy for run in runs],
            title=f"Profile over {self.n_steps} decoding steps",
        )
        table.add_rows(
            [
                ["prefill ms"] + [run.prefill_seconds * 1e3 for run in runs],
                ["step ms (mean)"] + [run.mean_step_seconds * 1e3 for run in runs],
                ["tokens/s"] + [run.tokens_per_second for run in runs],
                ["encoder passes (prefill)"] + [run.prefill_passes[0] for run in runs],
                ["decoder passes (prefill)"] + [run.prefill_passes[1] for run in runs],
                ["decoder passes (decode)"] + [run.decode_passes[1] for run in runs],
                ["peak KiB"] + [run.peak_bytes / 1024 for run in runs],
            ]
        )
        text = str(table)
        ratios = self.ratios()
        if ratios:
            ratio_table = Table(["ratio", f"{self.contrast.strategy}/baseline"], precision=2)
            ratio_table.add_rows([[name, value] for name, value in ratios.items()])
            text += "\n" + str(ratio_table)
        return text


def _profile_run(model, x, prompt, config, n_steps):
    tracemalloc.start()
    try:
        start = time.perf_counter()
        session = start_session(model, x, prompt, config, stop_token=None)
        prefill_seconds = time.perf_counter() - start
        prefill_passes = session.counters.snapshot()

        step_seconds = []
        for _ in range(n_steps):
            start = time.perf_counter()
            step(session)
            step_seconds.append(time.perf_counter() - start)
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()

    after = session.counters.snapshot()
    session.close()
    return ProfileRun(
        strategy=config.strategy,
        prefill_seconds=prefill_seconds,
        step_seconds=step_seconds,
        prefill_passes=prefill_passes,
        decode_passes=(after[0] - prefill_passes[0], after[1] - prefill_passes[1]),
        peak_bytes=peak,
    )


def profile(model, x, prompt, config, n_steps):
    """
    Profile the baseline and, unless ``config`` already selects it, the
    configured strategy on identical inputs.

    Sessions never stop early, so every run has exactly ``n_steps`` samples.

    Returns:
        ProfileReport
    """
    require(n_steps >= 1, f"n_steps must be >= 1, got {n_steps}")
    runs = {"baseline": _profile_run(model, x, prompt, config.replace(strategy="baseline"), n_steps)}
    if config.uses_slow_path:
        runs[config.strategy] = _profile_run(model, x, prompt, config, n_steps)
    return ProfileReport(n_steps=n_steps, runs=runs)
