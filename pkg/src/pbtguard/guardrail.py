"""Phase two: turn the per-state assertions of a verified PBT into guards and
check them at runtime between the controller and the plant.

Supported assertion grammar inside the test's ``for state in ...`` loop:

* comparisons between a state field and a constant, including chains
  (``0 <= state.x <= 2``), ``==``/``!=``, ``is None``/``is not None`` and
  ``in (c1, c2, ...)``;
* a bare field (truthiness) and ``not``;
* ``and`` / ``or`` over the above;
* ``if cond: assert ...`` (with optional ``else``) as an implication.

Anything else is reported as a :class:`GuardExtractionError`; such guards
can be written by hand as ``custom`` expressions in a guard file.

Guard file format (JSON)::

    {"format": "pbtguard-guards/1", "subject_id": "pcs",
     "guards": [{"guard_id": ..., "property_text": ..., "origin_pbt": ...,
                 "constraints": [<predicate>, ...]}]}

where a predicate is one of ``{"kind": "interval", "field", "lo", "hi",
"lo_closed", "hi_closed"}``, ``{"kind": "equals", "field", "value"}``,
``{"kind": "truthy", "field"}``, ``{"kind": "not", "operand"}``,
``{"kind": "and"|"or", "operands": [...]}``, ``{"kind": "implies",
"antecedent", "consequent"}`` or ``{"kind": "custom", "expression"}``
(a Python expression over ``state``).
"""

from __future__ import annotations

import ast
import enum
import json
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from .corpus import get_subject, state_record
from .corpus.faults import FaultDescriptor, make_tamper, parse_faults
from .errors import ConfigurationError, ContractError, GuardExtractionError
from .records import GeneratedPBT, Status

GUARD_FORMAT = "pbtguard-guards/1"

# attribute names that the subjects expose as aliases of schema fields
FIELD_ALIASES = {
    "tcs": {"heater_state": "heater_value", "cooler_state": "cooler_value"},
}


def _value(state, name):
    if isinstance(state, dict):
        return state[name]
    return getattr(state, name)


def _const(value) -> str:
    return repr(value)


# -- predicates ----------------------------------------------------------------

class Predicate:
    kind = ""

    def holds(self, state) -> bool:  # pragma: no cover
        raise NotImplementedError

    def fields(self) -> set:
        return set()

    def render(self) -> str:  # pragma: no cover
        raise NotImplementedError

    def to_dict(self) -> dict:  # pragma: no cover
        raise NotImplementedError


@dataclass(frozen=True)
class Interval(Predicate):
    field: str
    lo: Optional[float] = None
    hi: Optional[float] = None
    lo_closed: bool = True
    hi_closed: bool = True
    kind = "interval"

    def __post_init__(self):
        for bound in (self.lo, self.hi):
            if bound is not None and isinstance(bound, float) and not math.isfinite(bound):
                raise ConfigurationError(f"interval bound on {self.field} must be finite")

    def holds(self, state):
        x = _value(state, self.field)
        if self.lo is not None and not (self.lo <= x if self.lo_closed else self.lo < x):
            return False
        if self.hi is not None and not (x <= self.hi if self.hi_closed else x < self.hi):
            return False
        return True

    def fields(self):
        return {self.field}

    def render(self):
        if self.hi is None and self.lo is not None:
            return f"{self.field} {'>=' if self.lo_closed else '>'} {_const(self.lo)}"
        left = "" if self.lo is None else f"{_const(self.lo)} {'<=' if self.lo_closed else '<'} "
        right = "" if self.hi is None else f" {'<=' if self.hi_closed else '<'} {_const(self.hi)}"
        return f"{left}{self.field}{right}"

    def to_dict(self):
        return {"kind": self.kind, "field": self.field, "lo": self.lo, "hi": self.hi,
                "lo_closed": self.lo_closed, "hi_closed": self.hi_closed}


@dataclass(frozen=True)
class Equals(Predicate):
    field: str
    value: Any
    kind = "equals"

    def holds(self, state):
        x = _value(state, self.field)
        if self.value is None or isinstance(self.value, bool) and isinstance(x, bool):
            return x is self.value
        return x == self.value

    def fields(self):
        return {self.field}

    def render(self):
        op = "is" if self.value is None else "=="
        return f"{self.field} {op} {_const(self.value)}"

    def to_dict(self):
        return {"kind": self.kind, "field": self.field, "value": self.value}


@dataclass(frozen=True)
class Truthy(Predicate):
    field: str
    kind = "truthy"

    def holds(self, state):
        return bool(_value(state, self.field))

    def fields(self):
        return {self.field}

    def render(self):
        return self.field

    def to_dict(self):
        return {"kind": self.kind, "field": self.field}


@dataclass(frozen=True)
class Not(Predicate):
    operand: Predicate
    kind = "not"

    def holds(self, state):
        return not self.operand.holds(state)

    def fields(self):
        return self.operand.fields()

    def render(self):
        return f"not ({self.operand.render()})"

    def to_dict(self):
        return {"kind": self.kind, "operand": self.operand.to_dict()}


@dataclass(frozen=True)
class And(Predicate):
    operands: tuple
    kind = "and"

    def holds(self, state):
        return all(p.holds(state) for p in self.operands)

    def fields(self):
        return set().union(*(p.fields() for p in self.operands))

    def render(self):
        return " and ".join(f"({p.render()})" for p in self.operands)

    def to_dict(self):
        return {"kind": self.kind, "operands": [p.to_dict() for p in self.operands]}


@dataclass(frozen=True)
class Or(And):
    kind = "or"

    def holds(self, state):
        return any(p.holds(state) for p in self.operands)

    def render(self):
        return " or ".join(f"({p.render()})" for p in self.operands)


@dataclass(frozen=True)
class Implies(Predicate):
    antecedent: Predicate
    consequent: Predicate
    kind = "implies"

    def holds(self, state):
        return not self.antecedent.holds(state) or self.consequent.holds(state)

    def fields(self):
        return self.antecedent.fields() | self.consequent.fields()

    def render(self):
        return f"({self.antecedent.render()}) implies ({self.consequent.render()})"

    def to_dict(self):
        return {"kind": self.kind, "antecedent": self.antecedent.to_dict(),
                "consequent": self.consequent.to_dict()}


_SAFE_BUILTINS = {"abs": abs, "min": min, "max": max, "round": round, "len": len, "all": all, "any": any,
                  "math": math, "True": True, "False": False, "None": None}


@dataclass(frozen=True)
class Custom(Predicate):
    expression: str
    kind = "custom"

    def __post_init__(self):
        try:
            code = compile(self.expression, "<guard>", "eval")
        except SyntaxError as exc:
            raise ConfigurationError(f"custom guard {self.expression!r}: {exc.msg}") from exc
        object.__setattr__(self, "_code", code)

    def holds(self, state):
        return bool(eval(self._code, {"__builtins__": _SAFE_BUILTINS}, {"state": _StateView(state)}))

    def fields(self):
        tree = ast.parse(self.expression, mode="eval")
        return {n.attr for n in ast.walk(tree)
                if isinstance(n, ast.Attribute) and isinstance(n.value, ast.Name) and n.value.id == "state"}

    def render(self):
        return self.expression

    def to_dict(self):
        return {"kind": self.kind, "expression": self.expression}


class _StateView:
    def __init__(self, state):
        self._state = state

    def __getattr__(self, name):
        try:
            return _value(self._state, name)
        except (KeyError, AttributeError):
            raise AttributeError(name) from None


def predicate_from_dict(data: dict) -> Predicate:
    kind = data.get("kind")
    try:
        if kind == "interval":
            return Interval(data["field"], data.get("lo"), data.get("hi"),
                            data.get("lo_closed", True), data.get("hi_closed", True))
        if kind == "equals":
            return Equals(data["field"], data.get("value"))
        if kind == "truthy":
            return Truthy(data["field"])
        if kind == "not":
            return Not(predicate_from_dict(data["operand"]))
        if kind in ("and", "or"):
            cls = And if kind == "and" else Or
            return cls(tuple(predicate_from_dict(d) for d in data["operands"]))
        if kind == "implies":
            return Implies(predicate_from_dict(data["antecedent"]), predicate_from_dict(data["consequent"]))
        if kind == "custom":
            return Custom(data["expression"])
    except KeyError as exc:
        raise ConfigurationError(f"{kind} predicate lacks {exc.args[0]!r}") from None
    raise ConfigurationError(f"unknown predicate kind {kind!r}")


# -- guards --------------------------------------------------------------------

@dataclass(frozen=True)
class GuardSpec:
    guard_id: str
    property_text: str
    constraints: tuple  # predicates, all must hold
    origin_pbt: str = ""

    def fields(self) -> set:
        return set().union(*(c.fields() for c in self.constraints)) if self.constraints else set()

    def violated(self, state) -> list:
        """Rendered text of every constraint the state breaks."""
        out = []
        for c in self.constraints:
            try:
                ok = c.holds(state)
            except Exception as exc:  # noqa: BLE001 - a guard that cannot be evaluated fails closed
                out.append(f"{c.render()} (cannot evaluate: {type(exc).__name__}: {exc})")
                continue
            if not ok:
                out.append(c.render())
        return out

    def holds(self, state) -> bool:
        return not self.violated(state)

    @property
    def field_constraints(self) -> list:
        return [(sorted(c.fields()), c) for c in self.constraints]

    def to_dict(self) -> dict:
        return {"guard_id": self.guard_id, "property_text": self.property_text, "origin_pbt": self.origin_pbt,
                "constraints": [c.to_dict() for c in self.constraints]}

    @classmethod
    def from_dict(cls, data: dict) -> "GuardSpec":
        try:
            return cls(data["guard_id"], data.get("property_text", ""),
                       tuple(predicate_from_dict(c) for c in data["constraints"]), data.get("origin_pbt", ""))
        except KeyError as exc:
            raise ConfigurationError(f"guard entry lacks {exc.args[0]!r}") from None


def save_guards(path, subject_id: str, guards: Sequence[GuardSpec]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = {"format": GUARD_FORMAT, "subject_id": subject_id, "guards": [g.to_dict() for g in guards]}
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return path


def load_guards(path) -> tuple:
    """Return ``(subject_id, guards)`` from a guard file."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid guard file ({exc.msg})") from exc
    if data.get("format") != GUARD_FORMAT:
        raise ConfigurationError(f"{path}: expected format {GUARD_FORMAT!r}")
    return data.get("subject_id"), [GuardSpec.from_dict(g) for g in data.get("guards", [])]


# -- compilation ---------------------------------------------------------------

class _Unsupported(Exception):
    pass


class _Translator:
    def __init__(self, var: str, schema: set, aliases: dict):
        self.var = var
        self.schema = schema
        self.aliases = aliases

    def field(self, node) -> Optional[str]:
        if isinstance(node, ast.Attribute) and isinstance(node.value, ast.Name) and node.value.id == self.var:
            name = self.aliases.get(node.attr, node.attr)
            if name not in self.schema:
                raise _Unsupported(f"unknown state field {node.attr!r}")
            return name
        return None

    def const(self, node):
        try:
            value = ast.literal_eval(node)
        except (ValueError, SyntaxError, TypeError):
            raise _Unsupported("operand is neither a state field nor a constant") from None
        if isinstance(value, (int, float, bool, str)) or value is None:
            return value
        if isinstance(value, (tuple, list, set, frozenset)):
            return tuple(value)
        raise _Unsupported("unsupported constant")

    def compare(self, op, left, right) -> Predicate:
        lf, rf = self.field(left), self.field(right)
        if lf and rf:
            raise _Unsupported("comparison between two state fields")
        if not lf and not rf:
            raise _Unsupported("comparison without a state field")
        if rf:  # constant on the left: mirror the operator
            mirror = {ast.Lt: ast.Gt, ast.LtE: ast.GtE, ast.Gt: ast.Lt, ast.GtE: ast.LtE}
            if type(op) in mirror:
                op = mirror[type(op)]()
            elif isinstance(op, (ast.In, ast.NotIn)):
                raise _Unsupported("membership test with the field on the right")
            name, value = rf, self.const(left)
        else:
            name, value = lf, self.const(right)
        if isinstance(op, (ast.Eq, ast.Is)):
            return Equals(name, value)
        if isinstance(op, (ast.NotEq, ast.IsNot)):
            return Not(Equals(name, value))
        if isinstance(op, (ast.In, ast.NotIn)):
            if not isinstance(value, tuple):
                raise _Unsupported("membership test needs a literal collection")
            pred = Or(tuple(Equals(name, v) for v in value))
            return pred if isinstance(op, ast.In) else Not(pred)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise _Unsupported("ordering comparison needs a numeric constant")
        if isinstance(op, ast.Lt):
            return Interval(name, None, value, True, False)
        if isinstance(op, ast.LtE):
            return Interval(name, None, value, True, True)
        if isinstance(op, ast.Gt):
            return Interval(name, value, None, False, True)
        if isinstance(op, ast.GtE):
            return Interval(name, value, None, True, True)
        raise _Unsupported(f"operator {type(op).__name__}")

    def expr(self, node) -> Predicate:
        if isinstance(node, ast.BoolOp):
            parts = tuple(self.expr(v) for v in node.values)
            return And(parts) if isinstance(node.op, ast.And) else Or(parts)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Not):
            return Not(self.expr(node.operand))
        name = self.field(node)
        if name:
            return Truthy(name)
        if isinstance(node, ast.Compare):
            operands = [node.left] + list(node.comparators)
            preds = [self.compare(op, a, b) for op, a, b in zip(node.ops, operands, operands[1:])]
            return _merge_chain(preds)
        raise _Unsupported(f"{type(node).__name__} expression")


def _merge_chain(preds: list) -> Predicate:
    """``lo <= x <= hi`` arrives as two half-intervals on one field; fuse them."""
    if len(preds) == 2 and all(isinstance(p, Interval) for p in preds) and preds[0].field == preds[1].field:
        a, b = preds
        lo, lo_closed = (a.lo, a.lo_closed) if a.lo is not None else (b.lo, b.lo_closed)
        hi, hi_closed = (b.hi, b.hi_closed) if b.hi is not None else (a.hi, a.hi_closed)
        if (a.lo is None) != (b.lo is None):
            return Interval(a.field, lo, hi, lo_closed, hi_closed)
    return preds[0] if len(preds) == 1 else And(tuple(preds))


def _test_functions(tree):
    return [n for n in tree.body if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef))
            and n.name.startswith("test")]


def _state_loops(func) -> list:
    loops = []
    for node in ast.walk(func):
        if isinstance(node, ast.For) and isinstance(node.target, ast.Name):
            if any(isinstance(n, ast.Assert) for n in ast.walk(node)):
                loops.append(node)
    return loops


def _collect(body, condition, translator, guards_out, unsupported):
    for stmt in body:
        if isinstance(stmt, ast.Assert):
            text = ast.unparse(stmt.test)
            try:
                pred = translator.expr(stmt.test)
            except _Unsupported as exc:
                unsupported.append(f"{text} ({exc})")
                continue
            guards_out.append((text, pred if condition is None else Implies(condition, pred)))
        elif isinstance(stmt, ast.If):
            if not any(isinstance(n, ast.Assert) for n in ast.walk(stmt)):
                continue
            try:
                cond = translator.expr(stmt.test)
            except _Unsupported as exc:
                unsupported.append(f"if {ast.unparse(stmt.test)} ({exc})")
                continue
            here = cond if condition is None else And((condition, cond))
            _collect(stmt.body, here, translator, guards_out, unsupported)
            if stmt.orelse:
                other = Not(cond) if condition is None else And((condition, Not(cond)))
                _collect(stmt.orelse, other, translator, guards_out, unsupported)
        elif isinstance(stmt, (ast.Continue, ast.Break, ast.Return, ast.For, ast.While, ast.With, ast.Try)):
            if any(isinstance(n, ast.Assert) for n in ast.walk(stmt)) or isinstance(stmt, (ast.Continue, ast.Break)):
                unsupported.append(f"{type(stmt).__name__.lower()} statement in the state loop")


def _source_of(pbt) -> tuple:
    if isinstance(pbt, GeneratedPBT):
        return pbt.source, pbt.pbt_id, pbt.property_text
    return str(pbt), "pbt", ""


def compile_guards(pbt: Union[GeneratedPBT, str], subject_id: str, require_verified: bool = True) -> list:
    """Lift the per-state assertions of a verified PBT into guards."""
    if isinstance(pbt, GeneratedPBT) and require_verified and pbt.status is not Status.VERIFIED:
        raise ContractError(f"{pbt.pbt_id} is not verified; only verified PBTs become guards")
    subject = get_subject(subject_id)
    source, origin, property_text = _source_of(pbt)
    try:
        tree = ast.parse(source)
    except SyntaxError as exc:
        raise GuardExtractionError(f"PBT source does not parse: {exc.msg}") from exc
    if not property_text:
        from .llmclient import split_block

        units = split_block(source)
        property_text = units[0].property_text if units else ""
    aliases = FIELD_ALIASES.get(subject_id, {})
    schema = set(subject.state_fields)
    found, unsupported = [], []
    for func in _test_functions(tree):
        for loop in _state_loops(func):
            translator = _Translator(loop.target.id, schema, aliases)
            _collect(loop.body, None, translator, found, unsupported)
    if unsupported:
        raise GuardExtractionError("assertions outside the supported guard grammar: " + "; ".join(unsupported),
                                   unsupported)
    if not found:
        raise GuardExtractionError("no per-state assertion loop found in the PBT")
    return [GuardSpec(f"{origin}#{k}", property_text, (pred,), origin) for k, (_, pred) in enumerate(found, 1)]


def replay_assertions(source: str, states: Sequence) -> list:
    """Re-run the PBT's own state-loop body on each state.

    Returns one boolean per state: True when every assertion in the loop
    body passes for that state.  This is the reference the compiled guards
    are checked against.
    """
    tree = ast.parse(source)
    loops = [loop for func in _test_functions(tree) for loop in _state_loops(func)]
    if not loops:
        raise GuardExtractionError("no per-state assertion loop found in the PBT")
    namespace: dict = {}
    for node in tree.body:
        if isinstance(node, (ast.Import, ast.ImportFrom)):
            try:
                exec(compile(ast.Module([node], []), "<replay>", "exec"), namespace)
            except ImportError:
                pass
    checkers = []
    for k, loop in enumerate(loops):
        fn = ast.FunctionDef(name=f"_check_{k}", args=ast.arguments(
            posonlyargs=[], args=[ast.arg(arg=loop.target.id)], kwonlyargs=[], kw_defaults=[], defaults=[]),
            body=loop.body, decorator_list=[], returns=None, type_comment=None)
        module = ast.fix_missing_locations(ast.Module([fn], []))
        exec(compile(module, "<replay>", "exec"), namespace)
        checkers.append(namespace[f"_check_{k}"])
    verdicts = []
    for state in states:
        ok = True
        for check in checkers:
            try:
                check(state)
            except AssertionError:
                ok = False
        verdicts.append(ok)
    return verdicts


# -- monitoring ----------------------------------------------------------------

class MonitorMode(str, enum.Enum):
    WARN = "warn"
    BLOCK = "block"


@dataclass(frozen=True)
class MonitorPolicy:
    mode: MonitorMode = MonitorMode.WARN

    @classmethod
    def parse(cls, text: str) -> "MonitorPolicy":
        try:
            return cls(MonitorMode(text))
        except ValueError:
            raise ConfigurationError(f"policy must be warn or block, got {text!r}") from None


@dataclass(frozen=True)
class AlertEvent:
    tick: int
    guard_id: str
    state_snapshot: dict
    action: str  # "warned" | "blocked"
    detail: str

    def to_dict(self) -> dict:
        return {"tick": self.tick, "guard_id": self.guard_id, "action": self.action, "detail": self.detail,
                "state": self.state_snapshot}


class EventLog:
    """Append-only event sink; appends are serialized."""

    def __init__(self, path=None):
        self.events: list[AlertEvent] = []
        self._lock = threading.Lock()
        self._path = Path(path) if path else None
        if self._path:
            self._path.parent.mkdir(parents=True, exist_ok=True)
            self._path.write_text("", encoding="utf-8")

    def append(self, event: AlertEvent) -> None:
        with self._lock:
            self.events.append(event)
            if self._path:
                with self._path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(event.to_dict(), default=str) + "\n")


@dataclass
class MonitorResult:
    subject_id: str
    trace: list
    events: list
    policy: MonitorPolicy
    blocked_ticks: list = field(default_factory=list)

    @property
    def status(self) -> str:
        if not self.events:
            return "clean"
        return "blocked" if any(e.action == "blocked" for e in self.events) else "warned"


def check_guard_fields(subject_id: str, guards: Sequence[GuardSpec]) -> None:
    subject = get_subject(subject_id)
    schema = set(subject.state_fields)
    for guard in guards:
        missing = sorted(guard.fields() - schema)
        if missing:
            raise ConfigurationError(f"guard {guard.guard_id} references fields absent from {subject_id}: "
                                     + ", ".join(missing))


def write_trace(path, states: Sequence) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for state in states:
            fh.write(json.dumps(state_record(state), default=str) + "\n")
    return path


def run_monitored(subject_id: str, guards: Sequence[GuardSpec], policy: MonitorPolicy, ticks: int,
                  fault: Union[None, str, FaultDescriptor, Sequence[FaultDescriptor]] = None,
                  config_overrides: Optional[dict] = None, out_dir=None) -> MonitorResult:
    """Run a scenario with the guards checked on every predicted state."""
    subject = get_subject(subject_id)
    if subject.scenario_cls is None:
        raise ConfigurationError(f"subject {subject_id!r} has no scenario simulator to monitor")
    if not isinstance(ticks, int) or ticks <= 0:
        raise ConfigurationError("ticks must be a positive integer")
    if policy.mode is MonitorMode.BLOCK and subject.safe_command is None:
        raise ConfigurationError(f"subject {subject_id!r} declares no safe command; block mode unavailable")
    check_guard_fields(subject_id, guards)

    if isinstance(fault, str):
        faults = parse_faults(fault)
    elif isinstance(fault, FaultDescriptor):
        faults = (fault,)
    else:
        faults = tuple(fault or ())
    tamper = make_tamper(subject_id, faults) if faults else None
    config = subject.config_for_ticks(ticks, **(config_overrides or {})).validate()
    scenario = subject.scenario_cls.from_config(config, tamper=tamper)

    out = Path(out_dir) if out_dir else None
    log = EventLog(out / "events.jsonl" if out else None)
    blocked_ticks: list[int] = []

    def channel(tick, command, predict):
        predicted = predict(command)
        violations = [(g, d) for g in guards for d in [g.violated(predicted)] if d]
        if not violations:
            return command
        action = "blocked" if policy.mode is MonitorMode.BLOCK else "warned"
        snapshot = state_record(predicted)
        for guard, details in violations:
            log.append(AlertEvent(tick, guard.guard_id, snapshot, action, "; ".join(details)))
        if policy.mode is MonitorMode.BLOCK:
            blocked_ticks.append(tick)
            return subject.safe_command
        return command

    trace = scenario.execute_scenario(channel=channel)
    if out:
        write_trace(out / "trace.jsonl", trace)
    return MonitorResult(subject_id, trace, list(log.events), policy, blocked_ticks)
