"""MAPE feedback engine: monitor, diagnose, plan and execute.

The engine is generic over any managed system that answers the probe
contract (class instances that can be read) and accepts the effector
contract (settable parameters and rebindable component slots).  Violations
are classified by the uncertainty source written in the specification
document: context uncertainty is diagnosed through invariants (functional)
or utility thresholds (non-functional); components uncertainty through
absent readings (failure) or unstable readings (noise).  Planning is
intertwined with analysis: every candidate reconfiguration is re-checked
through a caller-supplied verifier before it is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Optional, Protocol, Sequence

from .speclang import (
    EntityKind,
    EntitySpec,
    Instance,
    SpecDocument,
    State,
    Trace,
    UNCERTAINTY_KINDS,
    Verdict,
    evaluate,
)
from .speclang.ast import AttrSort


class EngineError(Exception):
    """Base class for adaptation-engine failures."""


class ContractViolationError(EngineError):
    pass


class PlanFailedError(EngineError):
    """Planning exhausted its budget or its options; escalation required."""


class EffectorRejectedError(EngineError):
    pass


class UnknownAdaptiveGoalError(EngineError):
    pass


class ViolationType(Enum):
    NONE = "none"
    CONU_FR = "ConU_FR"
    CONU_NFR = "ConU_NFR"
    COMU_FR = "ComU_FR"
    COMU_NFR = "ComU_NFR"


@dataclass(frozen=True)
class Reading:
    sensor_id: str
    variable: str
    value: Optional[float]  # None records a failed sensor
    timestamp: float

    def __post_init__(self) -> None:
        if self.timestamp < 0:
            raise ValueError("reading timestamps cannot be negative")


class Reconfiguration:
    """Base class of the plan outcomes."""

    __slots__ = ()


@dataclass(frozen=True)
class NoChange(Reconfiguration):
    pass


@dataclass(frozen=True)
class Parametric(Reconfiguration):
    changes: tuple[tuple[str, float], ...]  # (parameter, new value)


@dataclass(frozen=True)
class Structural(Reconfiguration):
    replacements: tuple[tuple[str, str], ...]  # (slot, replacement instance)


@dataclass
class ComponentPool:
    active: dict[str, str]
    standby: dict[str, list[str]]

    def copy(self) -> "ComponentPool":
        return ComponentPool(dict(self.active), {k: list(v) for k, v in self.standby.items()})

    def all_instances(self) -> list[str]:
        out = list(self.active.values())
        for instances in self.standby.values():
            out.extend(instances)
        return out


@dataclass(frozen=True)
class ProbeEffectorContract:
    probes: frozenset[tuple[str, str]]  # (sensor instance, variable); "" for derived
    effectors: frozenset[str]  # parameter names and component slots


@dataclass(frozen=True)
class EngineConfig:
    desired_utilities: Mapping[str, float] = field(
        default_factory=lambda: {"U_safety": 0.7}
    )
    param_step: Mapping[str, float] = field(
        default_factory=lambda: {"t_dispatch": 1.0, "t_close": -0.5, "t_open": 0.5}
    )
    param_domains: Mapping[str, tuple[float, float]] = field(
        default_factory=lambda: {
            "t_dispatch": (1.0, 30.0),
            "t_close": (1.5, 4.0),
            "t_open": (4.0, 6.5),
        }
    )
    max_plan_iterations: int = 32
    noise_window: int = 5
    noise_std_threshold: float = 3.0
    cycle_period_s: float = 60.0

    def __post_init__(self) -> None:
        for name, threshold in self.desired_utilities.items():
            if not 0.0 <= threshold <= 1.0:
                raise ValueError(f"utility threshold for {name!r} must be in [0, 1]")
        if self.max_plan_iterations < 1:
            raise ValueError("max_plan_iterations must be at least 1")
        if self.noise_window < 2:
            raise ValueError("noise_window must be at least 2")

    @staticmethod
    def from_dict(data: Mapping) -> "EngineConfig":
        kwargs = dict(data)
        if "param_domains" in kwargs:
            kwargs["param_domains"] = {
                k: (float(v[0]), float(v[1])) for k, v in kwargs["param_domains"].items()
            }
        return EngineConfig(**kwargs)


class ProbeSource(Protocol):
    def now(self) -> float: ...

    def instances(self, class_name: str) -> Sequence[tuple[str, str]]:
        """(slot, active instance id) pairs for one sensor class."""
        ...

    def read(self, slot: str) -> Optional[float]: ...

    def snapshot(self) -> Mapping[str, object]:
        """Current derived variables (metrics, parameters, utilities)."""
        ...


class EffectorSink(Protocol):
    def set_parameter(self, name: str, value: float) -> None: ...

    def bind_instance(self, slot: str, instance_id: str) -> None: ...


Verifier = Callable[[Reconfiguration], ViolationType]


def verify_contract(specs: SpecDocument, contract: ProbeEffectorContract) -> list[str]:
    """Check that every monitored variable has a probe and every planned
    parameter has an effector; returns one message per breach."""
    problems: list[str] = []
    probe_vars = {variable for _, variable in contract.probes}

    def probed(attr) -> bool:
        return any(attr.matches(v) for v in probe_vars)

    for entity in specs.of_kind(EntityKind.MONITOR):
        for attr in entity.numeric_attributes():
            if not probed(attr):
                problems.append(
                    f"monitor {entity.name!r} gauges {attr.name!r} but the target "
                    f"answers no such probe"
                )
    for entity in specs.of_kind(EntityKind.PLAN):
        for name in plan_parameters(entity):
            if name not in contract.effectors:
                problems.append(
                    f"plan {entity.name!r} produces {name!r} but the target "
                    f"accepts no such effector"
                )
    return problems


# -- monitoring -----------------------------------------------------------


def monitor_step(specs: SpecDocument, target: ProbeSource) -> list[Reading]:
    """Gauge every monitor entity's numeric variables through its sensor class."""
    readings: list[Reading] = []
    now = target.now()
    for entity in specs.of_kind(EntityKind.MONITOR):
        classes = entity.class_attributes()
        if not classes:
            raise ContractViolationError(
                f"monitor {entity.name!r} declares no sensor class to gauge through"
            )
        for cls in classes:
            pairs = target.instances(cls.name)
            if not pairs:
                raise ContractViolationError(
                    f"target exposes no instances of class {cls.name!r} "
                    f"required by monitor {entity.name!r}"
                )
            for slot, instance_id in pairs:
                readings.append(Reading(instance_id, slot, target.read(slot), now))
    return readings


def detect_noise(
    windows: Mapping[str, Sequence[Optional[float]]], cfg: EngineConfig
) -> dict[str, bool]:
    """Flag each sensor whose window of readings has excessive spread."""
    return {slot: window_is_noisy(values, cfg) for slot, values in windows.items()}


def window_is_noisy(values: Sequence[Optional[float]], cfg: EngineConfig) -> bool:
    present = [v for v in values if v is not None]
    if len(present) < 2:
        return False  # insufficient evidence
    mean = sum(present) / len(present)
    var = sum((v - mean) ** 2 for v in present) / (len(present) - 1)
    return math.sqrt(var) > cfg.noise_std_threshold


# -- diagnosis ------------------------------------------------------------


def affected_entities(specs: SpecDocument) -> list[tuple[EntitySpec, list[EntitySpec]]]:
    """Entities targeted by at least one uncertainty, with their sources in document order."""
    out: list[tuple[EntitySpec, list[EntitySpec]]] = []
    for entity in specs.entities:
        sources = [
            u
            for u in specs.entities
            if u.kind in UNCERTAINTY_KINDS and u.affected_goal == entity.name
        ]
        if sources:
            out.append((entity, sources))
    return out


def utility_attribute(entity: EntitySpec) -> Optional[str]:
    for attr in entity.attributes:
        if attr.sort is AttrSort.NUMERIC and attr.name.startswith("U_"):
            return attr.name
    return None


def utility_threshold(entity: EntitySpec, cfg: EngineConfig) -> Optional[float]:
    if entity.name in cfg.desired_utilities:
        return cfg.desired_utilities[entity.name]
    attr = utility_attribute(entity)
    if attr is not None and attr in cfg.desired_utilities:
        return cfg.desired_utilities[attr]
    return None


def monitor_slots(entity: EntitySpec, readings: Sequence[Reading]) -> list[Reading]:
    families = entity.output or tuple(a.name for a in entity.numeric_attributes())
    declared = [a for a in entity.attributes if a.name in families] or list(
        entity.numeric_attributes()
    )
    return [r for r in readings if any(a.matches(r.variable) for a in declared)]


def failed_slots(entity: EntitySpec, readings: Sequence[Reading]) -> list[str]:
    return [r.variable for r in monitor_slots(entity, readings) if r.value is None]


def noisy_slots(
    entity: EntitySpec, trace: Trace, readings: Sequence[Reading], cfg: EngineConfig
) -> list[str]:
    slots = sorted({r.variable for r in monitor_slots(entity, readings)})
    windows = {
        slot: [s.values.get(slot) for s in trace.states[-cfg.noise_window :]]
        for slot in slots
    }
    flags = detect_noise(windows, cfg)
    return [slot for slot in slots if flags[slot]]


def diagnose(
    specs: SpecDocument,
    readings: Sequence[Reading],
    trace: Trace,
    cfg: EngineConfig,
) -> dict[str, ViolationType]:
    """Classify each affected goal's state into the violation taxonomy.

    The case split follows the affecting uncertainty's category and
    requirement kind; the first source reporting a violation wins, and an
    inconclusive invariant verdict counts as no violation.
    """
    result: dict[str, ViolationType] = {}
    for entity, sources in affected_entities(specs):
        verdict = ViolationType.NONE
        for source in sources:
            context = source.kind is EntityKind.CONTEXT_UNCERTAINTY
            functional = source.affected_violation_kind == "FR"
            if context and functional:
                if entity.invariant is not None and trace.states:
                    outcome = evaluate(entity.invariant, trace, len(trace.states) - 1)
                    if outcome is Verdict.VIOL:
                        verdict = ViolationType.CONU_FR
            elif context and not functional:
                attr = utility_attribute(entity)
                threshold = utility_threshold(entity, cfg)
                if attr is not None and threshold is not None and trace.states:
                    value = trace.states[-1].values.get(attr)
                    if value is not None and float(value) < threshold:
                        verdict = ViolationType.CONU_NFR
            elif not context and functional:
                if failed_slots(entity, readings):
                    verdict = ViolationType.COMU_FR
            else:
                if noisy_slots(entity, trace, readings, cfg):
                    verdict = ViolationType.COMU_NFR
            if verdict is not ViolationType.NONE:
                break
        result[entity.name] = verdict
    return result


# -- planning -------------------------------------------------------------


def plan_entity_for(specs: SpecDocument, goal: str) -> Optional[EntitySpec]:
    for entity in specs.of_kind(EntityKind.PLAN):
        if entity.from_goal == goal:
            return entity
    return None


def plan_parameters(entity: EntitySpec) -> list[str]:
    # plan outputs name the produced values; a trailing _new maps onto the
    # effector parameter being replaced
    return [name.removesuffix("_new") for name in entity.output]


def plan(
    specs: SpecDocument,
    goal: str,
    violation: ViolationType,
    params: Mapping[str, float],
    pool: ComponentPool,
    verifier: Verifier,
    cfg: EngineConfig,
    failing: Sequence[str] = (),
) -> Reconfiguration:
    """Search a reconfiguration that the verifier accepts.

    Context violations step the goal's plan parameters by their configured
    increments, re-verifying after each step; components violations swap the
    failing slots onto the first standby instance.  Raises
    :class:`PlanFailedError` when the budget or the options run out.
    """
    if violation is ViolationType.NONE:
        return NoChange()

    if violation in (ViolationType.CONU_FR, ViolationType.CONU_NFR):
        entity = plan_entity_for(specs, goal)
        if entity is None:
            raise UnknownAdaptiveGoalError(f"no plan entity serves goal {goal!r}")
        names = plan_parameters(entity)
        if not names:
            raise PlanFailedError(f"plan entity for {goal!r} declares no output parameters")
        missing = [n for n in names if n not in params]
        if missing:
            raise ContractViolationError(f"target exposes no parameters {missing}")
        candidate = {n: float(params[n]) for n in names}
        # planning is intertwined with analysis: when the current setting
        # already verifies clean, the live violation is transient convergence
        # and the configuration is kept
        if verifier(Parametric(tuple((n, candidate[n]) for n in names))) is ViolationType.NONE:
            return NoChange()
        for _ in range(cfg.max_plan_iterations - 1):
            moved = False
            for n in names:
                step = cfg.param_step.get(n)
                if step is None:
                    raise PlanFailedError(f"no step size configured for parameter {n!r}")
                low, high = cfg.param_domains.get(n, (-math.inf, math.inf))
                stepped = min(max(candidate[n] + step, low), high)
                if stepped != candidate[n]:
                    moved = True
                candidate[n] = stepped
            if not moved:
                raise PlanFailedError(
                    f"parameters {names} are clamped at their domain bounds and the "
                    f"violation persists"
                )
            reconfig = Parametric(tuple((n, candidate[n]) for n in names))
            if verifier(reconfig) is ViolationType.NONE:
                return reconfig
        raise PlanFailedError(
            f"no acceptable parameter setting within {cfg.max_plan_iterations} iterations"
        )

    # components violation: structural replacement
    if not failing:
        raise PlanFailedError(f"components violation on {goal!r} without identified slots")
    replacements = []
    for slot in failing:
        standby = pool.standby.get(slot, [])
        if not standby:
            raise PlanFailedError(f"no standby instance available for slot {slot!r}")
        replacements.append((slot, standby[0]))
    reconfig = Structural(tuple(replacements))
    if verifier(reconfig) is not ViolationType.NONE:
        raise PlanFailedError(f"replacement for {failing} does not clear the violation")
    return reconfig


# -- execution ------------------------------------------------------------


def execute(
    reconfig: Reconfiguration,
    target: EffectorSink,
    pool: ComponentPool,
    cfg: EngineConfig,
) -> ComponentPool:
    """Apply a reconfiguration; returns the updated component pool."""
    if isinstance(reconfig, NoChange):
        return pool
    if isinstance(reconfig, Parametric):
        for name, value in reconfig.changes:
            low, high = cfg.param_domains.get(name, (-math.inf, math.inf))
            if not low <= value <= high:
                raise EffectorRejectedError(
                    f"value {value} for parameter {name!r} is outside [{low}, {high}]"
                )
        for name, value in reconfig.changes:
            target.set_parameter(name, value)
        return pool
    if isinstance(reconfig, Structural):
        updated = pool.copy()
        for slot, replacement in reconfig.replacements:
            standby = updated.standby.get(slot, [])
            if replacement not in standby:
                raise EffectorRejectedError(
                    f"instance {replacement!r} is not on standby for slot {slot!r}"
                )
            previous = updated.active.get(slot)
            standby.remove(replacement)
            if previous is not None:
                standby.append(previous)
            updated.active[slot] = replacement
            target.bind_instance(slot, replacement)
        return updated
    raise TypeError(f"unknown reconfiguration {reconfig!r}")


# -- the loop -------------------------------------------------------------


@dataclass
class CycleReport:
    cycle_index: int
    sim_time: float
    readings: list[Reading]
    verdicts: dict[str, str]
    violation: dict[str, str]
    reconfiguration: dict[str, object]
    post_verdicts: dict[str, str]
    plan_iterations: dict[str, int]
    errors: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "cycle_index": self.cycle_index,
            "sim_time": self.sim_time,
            "readings": [
                {
                    "sensor_id": r.sensor_id,
                    "variable": r.variable,
                    "value": r.value,
                    "timestamp": r.timestamp,
                }
                for r in self.readings
            ],
            "verdicts": dict(self.verdicts),
            "violation": dict(self.violation),
            "reconfiguration": dict(self.reconfiguration),
            "post_verdicts": dict(self.post_verdicts),
            "plan_iterations": dict(self.plan_iterations),
            "errors": list(self.errors),
        }


def reconfiguration_to_dict(reconfig: Reconfiguration) -> dict:
    if isinstance(reconfig, NoChange):
        return {"kind": "no_change"}
    if isinstance(reconfig, Parametric):
        return {
            "kind": "parametric",
            "changes": [{"param": n, "value": v} for n, v in reconfig.changes],
        }
    if isinstance(reconfig, Structural):
        return {
            "kind": "structural",
            "replacements": [
                {"slot": s, "instance": i} for s, i in reconfig.replacements
            ],
        }
    raise TypeError(f"unknown reconfiguration {reconfig!r}")


class AdaptationEngine:
    """Drives one managed system through monitor/diagnose/plan/execute cycles.

    Cycles never overlap; state carried between cycles is the monitored
    trace, the component pool and the cycle counter.
    """

    def __init__(self, specs: SpecDocument, cfg: EngineConfig, pool: ComponentPool):
        self.specs = specs
        self.cfg = cfg
        self.pool = pool
        self.trace = Trace()
        self.cycle_index = 0

    def cycle(
        self,
        target: ProbeSource,
        effector: EffectorSink,
        verifier_for: Callable[[str, ViolationType], Verifier],
    ) -> CycleReport:
        report = CycleReport(
            cycle_index=self.cycle_index,
            sim_time=target.now(),
            readings=[],
            verdicts={},
            violation={},
            reconfiguration={},
            post_verdicts={},
            plan_iterations={},
        )
        # stage failures are data for the report, not reasons to stop looping
        try:
            readings = monitor_step(self.specs, target)
            self._append_state(target, readings)
        except EngineError as exc:
            report.errors.append(f"monitoring failed: {exc}")
            self.cycle_index += 1
            return report
        report.readings = readings

        for entity, _ in affected_entities(self.specs):
            if entity.invariant is not None:
                outcome = evaluate(entity.invariant, self.trace, len(self.trace.states) - 1)
                report.verdicts[entity.name] = outcome.value

        try:
            violations = diagnose(self.specs, readings, self.trace, self.cfg)
        except EngineError as exc:
            report.errors.append(f"diagnosis failed: {exc}")
            self.cycle_index += 1
            return report
        report.violation = {goal: vt.value for goal, vt in violations.items()}

        for entity, _ in affected_entities(self.specs):
            goal = entity.name
            vt = violations[goal]
            if vt is ViolationType.NONE:
                report.post_verdicts[goal] = ViolationType.NONE.value
                continue
            failing: list[str] = []
            if vt is ViolationType.COMU_FR:
                failing = failed_slots(entity, readings)
            elif vt is ViolationType.COMU_NFR:
                failing = noisy_slots(entity, self.trace, readings, self.cfg)
            calls = 0
            base_verifier = verifier_for(goal, vt)

            def counted(candidate: Reconfiguration) -> ViolationType:
                nonlocal calls
                calls += 1
                return base_verifier(candidate)

            try:
                reconfig = plan(
                    self.specs, goal, vt, self._parameters(target), self.pool,
                    counted, self.cfg, failing,
                )
            except PlanFailedError as exc:
                report.errors.append(f"plan failed for {goal!r}: {exc}")
                report.plan_iterations[goal] = calls
                report.post_verdicts[goal] = vt.value
                continue
            report.plan_iterations[goal] = calls
            report.reconfiguration[goal] = reconfiguration_to_dict(reconfig)
            if isinstance(reconfig, Structural):
                for slot, _ in reconfig.replacements:
                    self._forget_window(slot)
            self.pool = execute(reconfig, effector, self.pool, self.cfg)
            report.post_verdicts[goal] = ViolationType.NONE.value

        self.cycle_index += 1
        return report

    def _parameters(self, target: ProbeSource) -> dict[str, float]:
        return {
            k: float(v)  # type: ignore[arg-type]
            for k, v in target.snapshot().items()
            if isinstance(v, (int, float)) and not isinstance(v, bool)
        }

    def _append_state(self, target: ProbeSource, readings: Sequence[Reading]) -> None:
        values: dict[str, object] = dict(target.snapshot())
        instances: dict[str, dict[str, Instance]] = {}
        for entity in self.specs.of_kind(EntityKind.MONITOR):
            for cls in entity.class_attributes():
                members: dict[str, Instance] = {}
                for slot, instance_id in target.instances(cls.name):
                    reading = next((r for r in readings if r.variable == slot), None)
                    value = reading.value if reading else None
                    members[instance_id] = Instance(
                        id=instance_id, value=value, select=True, gauge=value is not None
                    )
                instances[cls.name] = members
        for r in readings:
            values[r.variable] = r.value
        state = State(time=target.now(), values=values, instances=instances)
        self.trace = self.trace.extended(state)

    def _forget_window(self, slot: str) -> None:
        """Drop a replaced slot's history so noise detection restarts cleanly."""
        states = tuple(
            State(
                time=s.time,
                values={k: v for k, v in s.values.items() if k != slot},
                instances=s.instances,
            )
            for s in self.trace.states
        )
        self.trace = Trace(states)
