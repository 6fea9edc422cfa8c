"""Declarative scenario files: JSON documents defining kets, projectors,
frameworks and a list of queries to evaluate.

Every error raised while reading a file is a ``ParseError`` carrying the
line and column of the offending JSON value.
"""

from __future__ import annotations

import json
import json.decoder
import json.scanner
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ParseError, QHistError, UnknownName
from .framework import Framework, common_refinement, frameworks_compatible
from .hilbert import Ket, Operator, Projector, projector_from_span, rank
from .histories import Dynamics, two_time_conditional, two_time_joint
from .logic import compatible, join, meet
from .probability import born_probability, conditional_probability, joint_probability
from .scenarios.report import ScenarioReport
from .tolerance import get_tol

QUERY_OPS = (
    "born", "joint", "conditional", "meet", "join", "compatible",
    "framework-check", "refinement", "two-time",
)
_TOP_KEYS = {"dimension", "kets", "operators", "projectors", "frameworks", "queries"}


# -- position-tracking JSON -------------------------------------------------

class _PosStr(str):
    pos: int


class _PosDict(dict):
    pos: int


class _PosList(list):
    pos: int


class _Duplicate(Exception):
    pass


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise _Duplicate(k)
        out[k] = v
    return out


def _reject_constant(name):
    raise ValueError(f"{name} is not allowed")


class _Locator:
    def __init__(self, text: str):
        self.text = text

    def where(self, node: Any) -> tuple[int | None, int | None]:
        pos = getattr(node, "pos", None)
        if pos is None:
            return None, None
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, node: Any, message: str, cls=ParseError, kind: str | None = None):
        line, col = self.where(node)
        return cls(message, line, col, kind=kind)


def _load_with_positions(text: str) -> Any:
    decoder = json.JSONDecoder(object_pairs_hook=_no_duplicates, parse_constant=_reject_constant)
    base_object, base_array, base_string = decoder.parse_object, decoder.parse_array, decoder.parse_string

    def parse_object(s_and_end, *args):
        start = s_and_end[1] - 1
        try:
            obj, end = base_object(s_and_end, *args)
        except _Duplicate as dup:
            text = s_and_end[0]
            raise ParseError(f"duplicate key {dup.args[0]!r}", *_line_col(text, start)) from None
        out = _PosDict(obj)
        out.pos = start
        return out, end

    def parse_array(s_and_end, scan_once):
        start = s_and_end[1] - 1
        arr, end = base_array(s_and_end, scan_once)
        out = _PosList(arr)
        out.pos = start
        return out, end

    def parse_string(s, end, strict):
        value, new_end = base_string(s, end, strict)
        out = _PosStr(value)
        out.pos = end - 1
        return out, new_end

    decoder.parse_object = parse_object
    decoder.parse_array = parse_array
    decoder.parse_string = parse_string
    decoder.scan_once = json.scanner.py_make_scanner(decoder)
    try:
        return decoder.decode(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    except RecursionError:
        raise ParseError("document nested too deeply") from None


def _line_col(text: str, pos: int) -> tuple[int, int]:
    return text.count("\n", 0, pos) + 1, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _plain(node: Any) -> Any:
    """Strip position wrappers."""
    if isinstance(node, dict):
        return {str(k): _plain(v) for k, v in node.items()}
    if isinstance(node, list):
        return [_plain(v) for v in node]
    if isinstance(node, str):
        return str(node)
    return node


# -- schema -----------------------------------------------------------------

@dataclass
class ProjectorDef:
    matrix: np.ndarray | None = None
    span: tuple[str, ...] | None = None

    def __eq__(self, other):
        if not isinstance(other, ProjectorDef):
            return NotImplemented
        if (self.matrix is None) != (other.matrix is None) or self.span != other.span:
            return False
        return self.matrix is None or np.array_equal(self.matrix, other.matrix)


@dataclass
class ScenarioFile:
    dimension: int
    kets: dict[str, np.ndarray] = field(default_factory=dict)
    operators: dict[str, np.ndarray] = field(default_factory=dict)
    projectors: dict[str, ProjectorDef] = field(default_factory=dict)
    frameworks: dict[str, tuple[str, ...]] = field(default_factory=dict)
    queries: list[dict[str, Any]] = field(default_factory=list)
    # JSON nodes kept for error locations; not part of the value
    nodes: dict[str, Any] = field(default_factory=dict, compare=False, repr=False)
    source: str | None = field(default=None, compare=False, repr=False)

    def __eq__(self, other):
        if not isinstance(other, ScenarioFile):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and _arrays_equal(self.kets, other.kets)
            and _arrays_equal(self.operators, other.operators)
            and self.projectors == other.projectors
            and self.frameworks == other.frameworks
            and self.queries == other.queries
        )

    def to_dict(self) -> dict[str, Any]:
        projectors = {}
        for name, pdef in self.projectors.items():
            if pdef.matrix is not None:
                projectors[name] = {"matrix": _matrix_json(pdef.matrix)}
            else:
                projectors[name] = {"span": list(pdef.span)}
        return {
            "dimension": self.dimension,
            "kets": {k: [[float(z.real), float(z.imag)] for z in v] for k, v in self.kets.items()},
            "operators": {k: _matrix_json(v) for k, v in self.operators.items()},
            "projectors": projectors,
            "frameworks": {k: list(v) for k, v in self.frameworks.items()},
            "queries": self.queries,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def serialize(sf: ScenarioFile) -> str:
    return sf.to_json()


def _arrays_equal(a: dict, b: dict) -> bool:
    return a.keys() == b.keys() and all(np.array_equal(a[k], b[k]) for k in a)


def _matrix_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


class _Reader:
    def __init__(self, text: str):
        self.loc = _Locator(text)

    def fail(self, node, message, cls=ParseError, kind=None):
        return self.loc.error(node, message, cls, kind)

    def mapping(self, node, what: str) -> dict:
        if not isinstance(node, dict):
            raise self.fail(node, f"{what} must be an object")
        return node

    def name_list(self, node, what: str) -> list[str]:
        if not isinstance(node, list) or not all(isinstance(x, str) for x in node):
            raise self.fail(node, f"{what} must be a list of names")
        return list(node)

    def number(self, node, what: str) -> float:
        if isinstance(node, bool) or not isinstance(node, (int, float)) or not math.isfinite(node):
            raise self.fail(node, f"{what} must be a finite number")
        return float(node)

    def complex_value(self, node, parent, what: str) -> complex:
        if not isinstance(node, list) or len(node) != 2:
            raise self.fail(node if hasattr(node, "pos") else parent,
                            f"{what} must be a [re, im] pair")
        return complex(self.number(node[0], what), self.number(node[1], what))

    def vector(self, node, dim: int, what: str) -> np.ndarray:
        if not isinstance(node, list):
            raise self.fail(node, f"{what} must be a list of [re, im] pairs")
        if len(node) != dim:
            raise self.fail(node, f"{what} has {len(node)} entries, expected {dim}",
                            kind="DimensionMismatch")
        return np.array([self.complex_value(z, node, what) for z in node], dtype=np.complex128)

    def matrix(self, node, dim: int, what: str) -> np.ndarray:
        if not isinstance(node, list):
            raise self.fail(node, f"{what} must be a list of rows")
        if len(node) != dim:
            raise self.fail(node, f"{what} has {len(node)} rows, expected {dim}",
                            kind="DimensionMismatch")
        return np.array([self.vector(row, dim, what) for row in node])


def parse_scenario_file(text: str) -> ScenarioFile:
    """Parse and validate a scenario document; raises ParseError with a location."""
    if not isinstance(text, str):
        raise ParseError("scenario text must be a string")
    root = _load_with_positions(text)
    r = _Reader(text)
    r.mapping(root, "document")
    unknown = set(root) - _TOP_KEYS
    if unknown:
        raise r.fail(root, f"unknown top-level keys: {sorted(unknown)}")
    if "dimension" not in root:
        raise r.fail(root, "missing 'dimension'")
    dim = root["dimension"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise r.fail(root, "'dimension' must be a positive integer")
    if "queries" not in root:
        raise r.fail(root, "missing 'queries'")

    sf = ScenarioFile(dimension=dim, source=text)
    for name, node in r.mapping(root.get("kets", {}), "'kets'").items():
        sf.kets[name] = r.vector(node, dim, f"ket {name!r}")
        sf.nodes[f"ket:{name}"] = node
    for name, node in r.mapping(root.get("operators", {}), "'operators'").items():
        sf.operators[name] = r.matrix(node, dim, f"operator {name!r}")
        sf.nodes[f"operator:{name}"] = node
    for name, node in r.mapping(root.get("projectors", {}), "'projectors'").items():
        r.mapping(node, f"projector {name!r}")
        if set(node) == {"matrix"}:
            sf.projectors[name] = ProjectorDef(matrix=r.matrix(node["matrix"], dim, f"projector {name!r}"))
        elif set(node) == {"span"}:
            kets = r.name_list(node["span"], f"span of {name!r}")
            if not kets:
                raise r.fail(node["span"], f"span of {name!r} is empty")
            for k, kn in zip(kets, node["span"]):
                if k not in sf.kets:
                    raise r.fail(kn, f"undefined ket {k!r}", UnknownName)
            sf.projectors[name] = ProjectorDef(span=tuple(kets))
        else:
            raise r.fail(node, f"projector {name!r} needs exactly one of 'matrix' or 'span'")
        sf.nodes[f"projector:{name}"] = node
    for name, node in r.mapping(root.get("frameworks", {}), "'frameworks'").items():
        members = r.name_list(node, f"framework {name!r}")
        if not members:
            raise r.fail(node, f"framework {name!r} is empty")
        if len(set(members)) != len(members):
            raise r.fail(node, f"framework {name!r} repeats a projector")
        for m, mn in zip(members, node):
            if m not in sf.projectors:
                raise r.fail(mn, f"undefined projector {m!r}", UnknownName)
        sf.frameworks[name] = tuple(members)
        sf.nodes[f"framework:{name}"] = node
    queries = root["queries"]
    if not isinstance(queries, list):
        raise r.fail(queries, "'queries' must be a list")
    for i, q in enumerate(queries):
        _validate_query(r, sf, q, i)
        sf.queries.append(_plain(q))
        sf.nodes[f"query:{i}"] = q
    return sf


_QUERY_FIELDS = {
    "born": {"projector": "projector", "state": "ket"},
    "joint": {"projectors": "projector-pair", "state": "ket"},
    "conditional": {"target": "projector", "given": "projector", "state": "ket"},
    "meet": {"projectors": "projector-pair"},
    "join": {"projectors": "projector-pair"},
    "compatible": {"projectors": "projector-pair"},
    "framework-check": {"frameworks": "framework-list"},
    "refinement": {"frameworks": "framework-list"},
    "two-time": {"state": "ket", "first": "timed", "second": "timed"},
}
_COMMON_OPTIONAL = {"op", "label", "expect", "tol", "expect_error"}
_TWO_TIME_OPTIONAL = {"steps", "unitaries", "intermediate", "mode"}


def _validate_query(r: _Reader, sf: ScenarioFile, q, i: int) -> None:
    r.mapping(q, f"query #{i}")
    op = q.get("op")
    if op not in QUERY_OPS:
        raise r.fail(op if hasattr(op, "pos") else q,
                     f"query #{i}: 'op' must be one of {', '.join(QUERY_OPS)}")
    required = _QUERY_FIELDS[op]
    allowed = _COMMON_OPTIONAL | set(required) | (_TWO_TIME_OPTIONAL if op == "two-time" else set())
    extra = set(q) - allowed
    if extra:
        raise r.fail(q, f"query #{i}: unexpected keys {sorted(extra)}")
    for key, kind in required.items():
        if key not in q:
            raise r.fail(q, f"query #{i} ({op}): missing {key!r}")
        _check_ref(r, sf, q[key], kind, f"query #{i} {key!r}")
    if "label" in q and not isinstance(q["label"], str):
        raise r.fail(q, f"query #{i}: 'label' must be a string")
    if "tol" in q and r.number(q["tol"], "'tol'") <= 0:
        raise r.fail(q, f"query #{i}: 'tol' must be positive")
    if "expect_error" in q and not isinstance(q["expect_error"], str):
        raise r.fail(q, f"query #{i}: 'expect_error' must be an error kind name")
    if "expect" in q:
        e = q["expect"]
        ok = {
            "born": _is_num, "joint": _is_num, "conditional": _is_num, "two-time": _is_num,
            "meet": lambda x: isinstance(x, str), "join": lambda x: isinstance(x, str),
            "compatible": lambda x: isinstance(x, bool),
            "framework-check": lambda x: x in ("compatible", "incompatible"),
            "refinement": lambda x: isinstance(x, int) and not isinstance(x, bool),
        }[op](e)
        if not ok:
            raise r.fail(e if hasattr(e, "pos") else q, f"query #{i}: bad 'expect' for {op}")
        if op in ("meet", "join"):
            _check_ref(r, sf, e, "projector", f"query #{i} 'expect'")
    if op == "two-time":
        _validate_two_time(r, sf, q, i)


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _check_ref(r: _Reader, sf: ScenarioFile, node, kind: str, what: str) -> None:
    if kind == "ket":
        if not isinstance(node, str):
            raise r.fail(node, f"{what} must be a ket name")
        if node not in sf.kets:
            raise r.fail(node, f"undefined ket {node!r}", UnknownName)
    elif kind == "projector":
        if not isinstance(node, str):
            raise r.fail(node, f"{what} must be a projector name")
        if node not in sf.projectors:
            raise r.fail(node, f"undefined projector {node!r}", UnknownName)
    elif kind == "projector-pair":
        names = r.name_list(node, what)
        if len(names) != 2:
            raise r.fail(node, f"{what} must name exactly two projectors")
        for n in node:
            _check_ref(r, sf, n, "projector", what)
    elif kind == "framework-list":
        names = r.name_list(node, what)
        if not names:
            raise r.fail(node, f"{what} is empty")
        for n in node:
            if n not in sf.frameworks:
                raise r.fail(n, f"undefined framework {n!r}", UnknownName)
    elif kind == "timed":
        r.mapping(node, what)
        if set(node) != {"projector", "time"}:
            raise r.fail(node, f"{what} needs exactly 'projector' and 'time'")
        _check_ref(r, sf, node["projector"], "projector", what)
        _check_time(r, node["time"], node, what)


def _check_time(r: _Reader, t, parent, what: str) -> None:
    if isinstance(t, bool) or not isinstance(t, int) or t < 1:
        raise r.fail(parent, f"{what}: 'time' must be an integer >= 1")


def _validate_two_time(r: _Reader, sf: ScenarioFile, q, i: int) -> None:
    what = f"query #{i}"
    times = [q["first"]["time"], q["second"]["time"]]
    if "mode" in q and q["mode"] not in ("joint", "conditional"):
        raise r.fail(q["mode"], f"{what}: 'mode' must be 'joint' or 'conditional'")
    for entry in q.get("intermediate", []) if isinstance(q.get("intermediate", []), list) else [None]:
        if entry is None:
            raise r.fail(q["intermediate"], f"{what}: 'intermediate' must be a list")
        r.mapping(entry, f"{what} intermediate entry")
        if set(entry) != {"time", "framework"}:
            raise r.fail(entry, f"{what}: intermediate entries need 'time' and 'framework'")
        _check_time(r, entry["time"], entry, what)
        if entry["framework"] not in sf.frameworks:
            raise r.fail(entry["framework"], f"undefined framework {entry['framework']!r}", UnknownName)
        times.append(entry["time"])
    if len(set(times)) != len(times):
        raise r.fail(q, f"{what}: event times must be distinct", kind="TimeMismatch")
    steps = q.get("steps", max(times))
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < max(times):
        raise r.fail(q, f"{what}: 'steps' must be an integer covering every event time",
                     kind="TimeMismatch")
    if "unitaries" in q:
        us = q["unitaries"]
        if not isinstance(us, list) or len(us) != steps:
            raise r.fail(us if hasattr(us, "pos") else q,
                         f"{what}: 'unitaries' must list {steps} operator names or null")
        for u in us:
            if u is not None and (not isinstance(u, str) or u not in sf.operators):
                raise r.fail(u if hasattr(u, "pos") else us, f"undefined operator {u!r}", UnknownName)


# -- evaluation -------------------------------------------------------------

class CompiledScenario:
    """Library objects built from a ScenarioFile; construction errors become
    ParseErrors pointing at the defining JSON value."""

    def __init__(self, sf: ScenarioFile, tol: float | None = None):
        self.sf = sf
        self.tol = get_tol(tol)
        self.loc = _Locator(sf.source or "")
        self.kets = {k: Ket(v) for k, v in sf.kets.items()}
        self.operators = {k: Operator(v) for k, v in sf.operators.items()}
        self.projectors: dict[str, Projector] = {}
        for name, pdef in sf.projectors.items():
            with self._located(f"projector:{name}"):
                if pdef.matrix is not None:
                    self.projectors[name] = Projector(pdef.matrix, tol=self.tol)
                else:
                    self.projectors[name] = projector_from_span(
                        [self.kets[k] for k in pdef.span], tol=self.tol)
        self.frameworks: dict[str, Framework] = {}
        for name, members in sf.frameworks.items():
            with self._located(f"framework:{name}"):
                self.frameworks[name] = Framework(
                    [self.projectors[m] for m in members], members, tol=self.tol)

    def _located(self, key: str):
        compiled = self

        class _Ctx:
            def __enter__(self):
                return None

            def __exit__(self, et, exc, tb):
                if isinstance(exc, QHistError) and not isinstance(exc, ParseError):
                    node = compiled.sf.nodes.get(key)
                    raise compiled.loc.error(node, f"{key}: {exc}", kind=exc.kind) from exc
                return False

        return _Ctx()

    def run(self, name: str = "check") -> ScenarioReport:
        rep = ScenarioReport(name)
        for i, q in enumerate(self.sf.queries):
            label = q.get("label") or f"#{i} {q['op']}"
            line, _ = self.loc.where(self.sf.nodes.get(f"query:{i}"))
            context = f"query #{i}" + (f" (line {line})" if line else "")
            tol = float(q.get("tol", self.tol))
            try:
                value, expected_kind = self._evaluate(q, tol)
            except QHistError as exc:
                rep.errors.append(_error_demo(label, q.get("expect_error", "none"), exc, context))
                continue
            if "expect_error" in q:
                from .scenarios.report import ErrorDemo
                rep.errors.append(ErrorDemo(label, q["expect_error"], None, f"{context}: no error raised"))
                continue
            if "expect" not in q:
                rep.check(label, value, None, "info")
            elif expected_kind == "projector":
                rep.check(label, value, True)
            else:
                rep.check(label, value, q["expect"], "==", tol if _is_num(q["expect"]) else 0.0)
        return rep

    def _evaluate(self, q: dict, tol: float):
        op = q["op"]
        P, K, F = self.projectors, self.kets, self.frameworks
        if op == "born":
            return born_probability(P[q["projector"]], K[q["state"]], tol), None
        if op == "joint":
            a, b = q["projectors"]
            return joint_probability(P[a], P[b], K[q["state"]], tol), None
        if op == "conditional":
            return conditional_probability(P[q["target"]], P[q["given"]], K[q["state"]], tol), None
        if op in ("meet", "join"):
            a, b = q["projectors"]
            result = (meet if op == "meet" else join)(P[a], P[b])
            if "expect" in q:
                target = P[q["expect"]]
                return bool(np.max(np.abs(result.matrix - target.matrix)) <= tol), "projector"
            return rank(result), None
        if op == "compatible":
            a, b = q["projectors"]
            return compatible(P[a], P[b], tol), None
        if op == "framework-check":
            fs = [F[n] for n in q["frameworks"]]
            ok = all(frameworks_compatible(x, y, tol) for x in fs for y in fs)
            return ("compatible" if ok else "incompatible"), None
        if op == "refinement":
            fs = [F[n] for n in q["frameworks"]]
            if len(fs) == 1:
                return len(fs[0]), None
            return len(common_refinement(*fs, tol=tol)), None
        if op == "two-time":
            first = (q["first"]["time"], P[q["first"]["projector"]])
            second = (q["second"]["time"], P[q["second"]["projector"]])
            times = [first[0], second[0]] + [e["time"] for e in q.get("intermediate", [])]
            steps = q.get("steps", max(times))
            names = q.get("unitaries", [None] * steps)
            eye = Operator(np.eye(self.sf.dimension))
            dyn = Dynamics([self.operators[u] if u else eye for u in names], tol=tol)
            mid = {e["time"]: F[e["framework"]] for e in q.get("intermediate", [])}
            if q.get("mode", "joint") == "conditional":
                return two_time_conditional(K[q["state"]], dyn, second, first, mid, tol), None
            return two_time_joint(K[q["state"]], dyn, first, second, mid, tol), None
        raise AssertionError(op)


def _error_demo(label: str, expected: str, exc: QHistError, context: str):
    from .scenarios.report import ErrorDemo

    return ErrorDemo(label, expected, exc.kind, f"{context}: {exc}")


def run_scenario_file(text: str, name: str = "check", tol: float | None = None) -> ScenarioReport:
    sf = parse_scenario_file(text)
    return CompiledScenario(sf, tol).run(name)
