"""Stable ``key: value`` result documents printed by the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

VERDICTS = ("sat", "unsat", "valid", "invalid", "true", "false")
POSITIVE = {"sat", "valid", "true"}


@dataclass
class ResultDocument:
    command: str
    verdict: Optional[str] = None
    witness: Optional[dict[str, str]] = None
    fixed_point_index: Optional[int] = None
    fields: dict[str, str] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict is not None and self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict}")

    def set_witness(self, assignment: dict) -> None:
        from atomless.frontend.printer import format_value
        if self.verdict != "sat":
            raise ValueError("a witness belongs to a sat verdict only")
        self.witness = {k: format_value(v) for k, v in sorted(assignment.items())}

    @property
    def exit_code(self) -> int:
        if self.verdict is None:
            return 0
        return 0 if self.verdict in POSITIVE else 1

    def render(self, with_timings: bool = False) -> str:
        lines = [f"command: {self.command}"]
        if self.verdict is not None:
            lines.append(f"verdict: {self.verdict}")
        for key, value in self.fields.items():
            lines.append(f"{key}: {value}")
        if self.fixed_point_index is not None:
            lines.append(f"fixed_point_index: {self.fixed_point_index}")
        if self.witness is not None:
            for name, value in self.witness.items():
                lines.append(f"witness.{name}: {value}")
        if with_timings:
            for name, secs in self.timings.items():
                lines.append(f"time.{name}: {secs:.3f}s")
        return "\n".join(lines) + "\n"

    @staticmethod
    def parse(text: str) -> dict[str, str]:
        """Inverse of :meth:`render` as a flat mapping."""
        out = {}
        for line in text.splitlines():
            if line.strip():
                key, _, value = line.partition(": ")
                out[key] = value
        return out
