"""
Experiment manifests and strategy comparison runs.

A manifest is a YAML file:

    name: ring-counting
    seed: 0
    model: {backend: toy, weights: toy.sptw}     # or {backend: scripted, spec: model.tsv, count_threshold: 0.001}
    strategies: [baseline, tcd]
    config: tcd.conf                              # optional key=value file
    overrides: {gamma_gate: 2.0}                  # optional, applied last
    max_tokens: 4
    output: out
    cases:
      - name: two-rings
        script: {duration_ms: 1000, events: [[100, 150, ring], [500, 150, ring]]}
        prompt: how many ring ?
        expected: "2"

Case audio is either ``script`` (inline mapping or path to a script file) or
``wav`` (path). Relative paths resolve against the manifest directory. Case
names become file names, so they are limited to letters, digits, ``.``, ``_``
and ``-``.
"""

import csv
import os
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import yaml

from slowpath.errors import ConfigError, SlowpathError
from slowpath.Engine.ExperimentTask import ExperimentTask
from slowpath.Engine.ParallelExperimentManager import ParallelExperimentManager
from slowpath.Engine.session import generate
from slowpath.Fusion.trace import write_trace_file
from slowpath.Logging.logger import error, info, log, success
from slowpath.Meta.config import STRATEGIES, load_config
from slowpath.Model.scripted import ScriptedAudioLM, load_scripted_spec
from slowpath.Model.toy import ToyAudioLM, ToyConfig
from slowpath.Model.vocab import detokenize
from slowpath.Model.weights import load_weights
from slowpath.Signal.synth import EventScript, parse_event_script, synth_event_audio
from slowpath.Signal.waveform import read_wav
from slowpath.TUI.table import Table

MANDATORY_FIELDS = ["cases", "strategies"]
MODEL_BACKENDS = ("toy", "scripted")
REPORT_COLUMNS = ["case", "strategy", "answer", "expected", "correct", "steps", "gate_rate", "mean_omega", "error"]
SUMMARY_COLUMNS = ["strategy", "accuracy", "delta", "gate_rate", "mean_omega", "cases", "errors"]
CASE_NAME = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


@dataclass
class ExperimentCase:
    name: str
    prompt: str
    expected: List[str]
    script: Optional[EventScript] = None
    wav: Optional[str] = None

    def load_audio(self):
        if self.wav is not None:
            return read_wav(self.wav)
        return synth_event_audio(self.script)


@dataclass
class ExperimentManifest:
    name: str
    cases: List[ExperimentCase]
    strategies: List[str]
    model: dict
    config_path: Optional[str] = None
    overrides: dict = field(default_factory=dict)
    output: str = "out"
    seed: int = 0
    max_tokens: int = 4
    workers: int = 1
    base_dir: str = "."


def _resolve(base_dir, path):
    return path if os.path.isabs(path) else os.path.join(base_dir, path)


def _load_case(raw, index, base_dir):
    if not isinstance(raw, dict):
        raise ConfigError("cases", f"case {index} must be a mapping")
    raw.setdefault("name", f"case{index}")
    raw["name"] = str(raw["name"])
    if not CASE_NAME.match(raw["name"]):
        raise ConfigError("cases", f"case name {raw['name']!r} must use only letters, digits, '.', '_' and '-'")
    raw.setdefault("expected", [])
    if "prompt" not in raw:
        raise ConfigError("cases", f"case {raw['name']} has no prompt")
    expected = raw["expected"]
    expected = str(expected).split() if not isinstance(expected, list) else [str(t) for t in expected]

    script = wav = None
    try:
        if "wav" in raw:
            wav = _resolve(base_dir, raw["wav"])
        elif isinstance(raw.get("script"), dict):
            script = EventScript(**raw["script"])
        elif isinstance(raw.get("script"), str):
            with open(_resolve(base_dir, raw["script"]), "r", encoding="utf-8") as f:
                script = parse_event_script(f.read())
        else:
            raise ConfigError("cases", f"case {raw['name']} needs a script or a wav")
    except (SlowpathError, TypeError, OSError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError("cases", f"case {raw['name']}: {e}")
    return ExperimentCase(raw["name"], str(raw["prompt"]), expected, script, wav)


def load_manifest(manifest_path):
    """
    Load and validate an experiment manifest.

    Raises:
        ConfigError: for a missing file, bad YAML or missing mandatory fields
    """
    if not os.path.exists(manifest_path):
        raise ConfigError(None, f"manifest {manifest_path} not found")
    try:
        with open(manifest_path, "r", encoding="utf-8") as f:
            manifest = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(None, f"error parsing YAML file: {e}")
    if not isinstance(manifest, dict):
        raise ConfigError(None, f"{manifest_path} is not a mapping")

    missing = [name for name in MANDATORY_FIELDS if name not in manifest]
    if missing:
        raise ConfigError(missing[0], f"missing mandatory field(s) in {manifest_path}: {', '.join(missing)}")

    base_dir = os.path.dirname(os.path.abspath(manifest_path))
    manifest.setdefault("name", os.path.splitext(os.path.basename(manifest_path))[0])
    manifest.setdefault("model", {})
    manifest.setdefault("overrides", {})
    manifest.setdefault("output", "out")
    manifest.setdefault("seed", 0)
    manifest.setdefault("max_tokens", 4)
    manifest.setdefault("workers", 1)
    manifest["model"].setdefault("backend", "toy")

    if not manifest["cases"]:
        raise ConfigError("cases", "manifest has no cases")
    strategies = [str(s) for s in manifest["strategies"]]
    unknown = [s for s in strategies if s not in STRATEGIES]
    if not strategies or unknown:
        raise ConfigError("strategies", f"strategies must be drawn from {STRATEGIES}, got {strategies}")
    if manifest["model"]["backend"] not in MODEL_BACKENDS:
        raise ConfigError("model", f"backend must be one of {MODEL_BACKENDS}")
    names = [case.get("name") for case in manifest["cases"] if isinstance(case, dict) and "name" in case]
    if len(names) != len(set(names)):
        raise ConfigError("cases", "case names must be unique")

    config_path = manifest.get("config")
    log(f"Loaded experiment manifest: {manifest['name']} ({len(manifest['cases'])} cases)")
    return ExperimentManifest(
        name=manifest["name"],
        cases=[_load_case(raw, i, base_dir) for i, raw in enumerate(manifest["cases"])],
        strategies=strategies,
        model=manifest["model"],
        config_path=_resolve(base_dir, config_path) if config_path else None,
        overrides=dict(manifest["overrides"]),
        output=_resolve(base_dir, manifest["output"]),
        seed=int(manifest["seed"]),
        max_tokens=int(manifest["max_tokens"]),
        workers=int(manifest["workers"]),
        base_dir=base_dir,
    )


def build_model(model_section, base_dir="."):
    """Instantiate the backend named in a manifest ``model`` section."""
    section = dict(model_section)
    backend = section.pop("backend", "toy")
    if backend == "scripted":
        if "spec" not in section:
            raise ConfigError("model", "scripted backend needs a spec path")
        threshold = section.get("count_threshold")
        try:
            threshold = None if threshold is None else float(threshold)
            return ScriptedAudioLM(load_scripted_spec(_resolve(base_dir, section["spec"])), count_threshold=threshold)
        except (TypeError, ValueError, OSError, SlowpathError) as e:
            raise ConfigError("model", str(e))
    if "weights" in section:
        return load_weights(_resolve(base_dir, section["weights"]))
    try:
        return ToyAudioLM(ToyConfig(**section))
    except (TypeError, SlowpathError) as e:
        raise ConfigError("model", str(e))


@dataclass
class CaseResult:
    case: str
    strategy: str
    answer: List[str]
    expected: List[str]
    steps: int = 0
    gate_rate: float = 0.0
    mean_omega: float = 0.0
    error: Optional[str] = None

    @property
    def correct(self):
        return self.error is None and self.answer == self.expected

    def to_row(self):
        return [
            self.case,
            self.strategy,
            " ".join(self.answer),
            " ".join(self.expected),
            "yes" if self.correct else "no",
            self.steps,
            f"{self.gate_rate:.9g}",
            f"{self.mean_omega:.9g}",
            self.error or "",
        ]


@dataclass
class ComparisonReport:
    """Per-case answers and per-strategy aggregates of one experiment run."""

    name: str
    strategies: List[str]
    cases: List[str]
    rows: List[CaseResult]

    def _rows(self, strategy):
        return [row for row in self.rows if row.strategy == strategy]

    @property
    def accuracy(self) -> Dict[str, float]:
        return {s: sum(r.correct for r in self._rows(s)) / len(self.cases) for s in self.strategies}

    @property
    def gate_activation_rate(self) -> Dict[str, float]:
        return {s: float(np.mean([r.gate_rate for r in self._rows(s)])) for s in self.strategies}

    @property
    def mean_candidates(self) -> Dict[str, float]:
        return {s: float(np.mean([r.mean_omega for r in self._rows(s)])) for s in self.strategies}

    @property
    def errors(self):
        return [row for row in self.rows if row.error is not None]

    @property
    def failed(self):
        return bool(self.errors)

    def delta(self, strategy):
        """Accuracy gain over the baseline, or None without a baseline run."""
        if "baseline" not in self.strategies:
            return None
        return self.accuracy[strategy] - self.accuracy["baseline"]

    def summary_rows(self):
        accuracy = self.accuracy
        gate_rate = self.gate_activation_rate
        omega = self.mean_candidates
        rows = []
        for s in self.strategies:
            delta = self.delta(s)
            rows.append(
                [
                    s,
                    accuracy[s],
                    "-" if delta is None else delta,
                    gate_rate[s],
                    omega[s],
                    len(self._rows(s)),
                    sum(1 for r in self._rows(s) if r.error is not None),
                ]
            )
        return rows

    def write_csv(self, directory):
        """Write ``report.csv`` (per case) and ``summary.csv`` (per strategy)."""
        with open(os.path.join(directory, "report.csv"), "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(REPORT_COLUMNS)
            writer.writerows(row.to_row() for row in self.rows)
        with open(os.path.join(directory, "summary.csv"), "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(SUMMARY_COLUMNS)
            for row in self.summary_rows():
                writer.writerow([f"{v:.9g}" if isinstance(v, float) else v for v in row])

    def render(self):
        """Aligned text tables: strategy summary, then per-case answers."""
        summary = Table(SUMMARY_COLUMNS, self.summary_rows(), title=f"{self.name}: strategy comparison")
        cases = Table(["case"] + self.strategies + ["expected"], title="answers")
        for case in self.cases:
            answers = {r.strategy: r for r in self.rows if r.case == case}
            cells = []
            for s in self.strategies:
                row = answers[s]
                cells.append("ERROR" if row.error else (" ".join(row.answer) or "-"))
            cases.add_row([case] + cells + [" ".join(answers[self.strategies[0]].expected)])
        return f"{summary}\n{cases}\n"


def _case_action(model, case, config, max_tokens):
    def action():
        return generate(model, case.load_audio(), case.prompt, config, max_tokens)

    return action


def run_experiment(manifest, config=None, output=None, workers=None, verbose=False):
    """
    Decode every (case, strategy) pair and write the report and traces.

    Args:
        manifest: ExperimentManifest
        config: Base DecodeConfig (loaded from the manifest when None)
        output: Output directory overriding the manifest's
        workers: Worker count overriding the manifest's
        verbose: Log every finished task

    Returns:
        ComparisonReport; failed pairs are recorded in its rows
    """
    if config is None:
        overrides = dict(manifest.overrides)
        overrides.setdefault("seed", manifest.seed)
        config = load_config(manifest.config_path, overrides)
    model = build_model(manifest.model, manifest.base_dir)
    output = output or manifest.output
    trace_dir = os.path.join(output, "traces")
    os.makedirs(trace_dir, exist_ok=True)

    tasks = []
    for case in manifest.cases:
        for strategy in manifest.strategies:
            action = _case_action(model, case, config.replace(strategy=strategy), manifest.max_tokens)
            tasks.append(ExperimentTask(case.name, strategy, action))

    info(f"Running {len(tasks)} decodes of {manifest.name} on {workers or manifest.workers} worker(s)")
    manager = ParallelExperimentManager(max_workers=workers or manifest.workers, verbose=verbose)
    rows = []
    for task, case in zip(manager.run(tasks), (c for c in manifest.cases for _ in manifest.strategies)):
        if task.failed:
            error(f"{task.name}: {task.error}")
            rows.append(CaseResult(case.name, task.strategy, [], case.expected, error=task.error))
            continue
        transcript = task.result
        write_trace_file(os.path.join(trace_dir, f"{task.name}.trace"), transcript.trace_lines())
        with open(os.path.join(trace_dir, f"{task.name}.summary"), "w", encoding="utf-8", newline="\n") as f:
            f.write(transcript.to_record() + "\n")
        rows.append(
            CaseResult(
                case.name,
                task.strategy,
                detokenize(transcript.answer).split(),
                case.expected,
                steps=len(transcript.tokens),
                gate_rate=transcript.gate_activation_rate,
                mean_omega=transcript.mean_candidates,
            )
        )

    report = ComparisonReport(manifest.name, manifest.strategies, [c.name for c in manifest.cases], rows)
    report.write_csv(output)
    with open(os.path.join(output, "report.txt"), "w", encoding="utf-8", newline="\n") as f:
        f.write(report.render())

    failed = manager.get_failed_tasks()
    if failed:
        error(f"{len(failed)} of {len(rows)} decodes failed: {', '.join(task.name for task in failed)}")
    else:
        success(f"Wrote report and {len(rows)} traces with summaries to {output}")
    return report
