"""Structured scenario reports with text and JSON renderings."""

from __future__ import annotations

import json
import operator
from dataclasses import dataclass, field
from typing import Any, Callable

from ..errors import QHistError

_RELATIONS: dict[str, Callable[[float, float], bool]] = {
    "<=": operator.le,
    ">=": operator.ge,
    "<": operator.lt,
    ">": operator.gt,
}


@dataclass
class Check:
    """A computed value compared with an expected value or bound.

    ``relation`` is ``"=="`` (within ``tol``), one of ``<= >= < >`` against
    ``expected``, or ``"info"`` for a purely informational value.
    ``passed`` is always recomputed.
    """

    label: str
    value: float | bool | str
    expected: float | bool | str
    relation: str = "=="
    tol: float = 0.0

    @property
    def passed(self) -> bool:
        if self.relation == "info":
            return True
        if isinstance(self.value, (bool, str)) or isinstance(self.expected, (bool, str)):
            return self.relation == "==" and self.value == self.expected
        if self.relation == "==":
            return abs(self.value - self.expected) <= self.tol
        return _RELATIONS[self.relation](self.value, self.expected)

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "value": self.value,
            "expected": self.expected,
            "relation": self.relation,
            "tol": self.tol,
            "passed": self.passed,
        }


@dataclass
class ErrorDemo:
    """An operation that must be refused with a specific error kind."""

    label: str
    expected_kind: str
    raised_kind: str | None
    context: str = ""

    @property
    def passed(self) -> bool:
        return self.raised_kind == self.expected_kind

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "expected_kind": self.expected_kind,
            "raised_kind": self.raised_kind,
            "context": self.context,
            "passed": self.passed,
        }


@dataclass
class ScenarioReport:
    name: str
    checks: list[Check] = field(default_factory=list)
    errors: list[ErrorDemo] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and all(e.passed for e in self.errors)

    def check(self, label: str, value, expected, relation: str = "==", tol: float = 0.0) -> Check:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            value = float(value)
        if isinstance(expected, (int, float)) and not isinstance(expected, bool):
            expected = float(expected)
        c = Check(label, value, expected, relation, tol)
        self.checks.append(c)
        return c

    def expect_error(self, label: str, expected_kind: str, fn: Callable[[], Any]) -> ErrorDemo:
        try:
            fn()
        except QHistError as exc:
            demo = ErrorDemo(label, expected_kind, exc.kind, str(exc))
        else:
            demo = ErrorDemo(label, expected_kind, None, "no error raised")
        self.errors.append(demo)
        return demo

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.name,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "errors": [e.to_dict() for e in self.errors],
            "data": self.data,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"scenario: {self.name}"]
        width = max([len(c.label) for c in self.checks] + [len(e.label) for e in self.errors] + [8])
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            if c.relation == "info":
                lines.append(f"  INFO  {c.label:<{width}}  value={c.value!r}")
                continue
            bound = f"{c.relation} {c.expected!r}"
            if c.relation == "==" and c.tol:
                bound += f" +/- {c.tol!r}"
            lines.append(f"  {flag}  {c.label:<{width}}  value={c.value!r}  expected {bound}")
        for e in self.errors:
            flag = "PASS" if e.passed else "FAIL"
            lines.append(
                f"  {flag}  {e.label:<{width}}  raised={e.raised_kind}  expected {e.expected_kind}"
            )
            if e.context:
                lines.append(f"        {e.context}")
        for key in sorted(self.data):
            lines.append(f"  {key} = {json.dumps(self.data[key], sort_keys=True)}")
        lines.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def matrix_to_json(m) -> list[list[list[float]]]:
    """Row-major nested [re, im] pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]
