"""
Per-step gate traces and their line-delimited record format.

A record is one line of tab-separated ``key=value`` fields in a fixed order:

    step=3	r_t=0.5	entropy=0.25	gate=0.5	omega=4,7,9	bias=4:0.1,7:0	token=7	baseline=9

Numbers are printed with 9 significant digits. ``omega`` and ``bias`` use
``-`` when empty.
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

from slowpath.errors import InvalidArgumentError

TRACE_FIELDS = ("step", "r_t", "entropy", "gate", "omega", "bias", "token", "baseline")


@dataclass(frozen=True)
class GateTrace:
    step_index: int
    r_t: float
    entropy_hat: float
    gate: float
    candidate_ids: Tuple[int, ...]
    applied_bias: Dict[int, float] = field(default_factory=dict)
    chosen_token: int = 0
    baseline_token: int = 0

    def __post_init__(self):
        if not 0.0 <= self.gate <= 1.0:
            raise InvalidArgumentError(f"gate must lie in [0, 1], got {self.gate}")
        if not set(self.applied_bias) <= set(self.candidate_ids):
            raise InvalidArgumentError("applied bias outside the candidate set")

    @property
    def changed_ids(self):
        """Candidate ids whose logit actually moved."""
        return tuple(j for j in self.candidate_ids if self.applied_bias.get(j, 0.0) != 0.0)

    def to_record(self):
        omega = ",".join(str(j) for j in self.candidate_ids) or "-"
        bias = ",".join(f"{j}:{self.applied_bias[j]:.9g}" for j in sorted(self.applied_bias)) or "-"
        values = (
            str(self.step_index),
            f"{self.r_t:.9g}",
            f"{self.entropy_hat:.9g}",
            f"{self.gate:.9g}",
            omega,
            bias,
            str(self.chosen_token),
            str(self.baseline_token),
        )
        return "\t".join(f"{key}={value}" for key, value in zip(TRACE_FIELDS, values))


def parse_trace_line(line):
    """
    Read one step record back into a GateTrace.

    Raises:
        InvalidArgumentError: if fields are missing, out of order or malformed
    """
    parts = line.rstrip("\n").split("\t")
    try:
        pairs = [part.split("=", 1) for part in parts]
        keys = tuple(key for key, _ in pairs)
        values = dict(pairs)
    except ValueError:
        raise InvalidArgumentError(f"malformed trace record: {line!r}")
    if keys != TRACE_FIELDS:
        raise InvalidArgumentError(f"unexpected trace fields {keys}")

    try:
        omega = () if values["omega"] == "-" else tuple(int(j) for j in values["omega"].split(","))
        bias = {}
        if values["bias"] != "-":
            for item in values["bias"].split(","):
                j, amount = item.split(":")
                bias[int(j)] = float(amount)
        return GateTrace(
            step_index=int(values["step"]),
            r_t=float(values["r_t"]),
            entropy_hat=float(values["entropy"]),
            gate=float(values["gate"]),
            candidate_ids=omega,
            applied_bias=bias,
            chosen_token=int(values["token"]),
            baseline_token=int(values["baseline"]),
        )
    except ValueError as e:
        raise InvalidArgumentError(f"malformed trace record: {e}")


def write_trace_file(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line + "\n")


def parse_header_line(line):
    """Fields of a ``session`` record as an ordered dict of strings."""
    parts = line.rstrip("\n").split("\t")
    if not parts or parts[0] != "session":
        raise InvalidArgumentError("trace stream must start with a session record")
    header = {}
    for part in parts[1:]:
        key, _, value = part.partition("=")
        header[key] = value
    return header


def read_trace_file(path):
    """
    Returns:
        (header fields, list of GateTrace)
    """
    with open(path, "r", encoding="utf-8") as f:
        lines = [line for line in f.read().splitlines() if line]
    if not lines:
        raise InvalidArgumentError(f"trace file {path} is empty")
    return parse_header_line(lines[0]), [parse_trace_line(line) for line in lines[1:]]
