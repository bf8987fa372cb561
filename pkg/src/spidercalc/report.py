"""Pass/fail records shared by the verification suites and the command line."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    name: str
    expected: str
    actual: str
    passed: bool

    @classmethod
    def equal(cls, name: str, expected, actual) -> "Check":
        return cls(name, str(expected), str(actual), expected == actual)

    @classmethod
    def holds(cls, name: str, ok: bool) -> "Check":
        return cls(name, "true", "true" if ok else "false", bool(ok))

    def to_dict(self) -> dict:
        return {"name": self.name, "expected": self.expected, "actual": self.actual, "pass": self.passed}

    @classmethod
    def from_dict(cls, data: dict) -> "Check":
        return cls(data["name"], data["expected"], data["actual"], bool(data["pass"]))


@dataclass
class Report:
    """Echo of the command, one record per check and the overall status."""

    command: list[str]
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def extend(self, checks) -> "Report":
        self.checks.extend(checks)
        return self

    def to_dict(self) -> dict:
        # field order is fixed so reports diff byte for byte
        return {
            "command": list(self.command),
            "checks": [c.to_dict() for c in self.checks],
            "data": self.data,
            "status": self.status,
        }

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Report":
        raw = json.loads(text)
        return cls(list(raw["command"]), [Check.from_dict(c) for c in raw["checks"]], dict(raw.get("data", {})))
