"""Readers and writers for pool-share exports, population documents,
fault scenarios and compromise models.

Pool shares are read as exact decimals. Population documents are JSON with
unknown fields rejected, and serialization is canonical (sorted keys,
replicas sorted by id) so documents round-trip byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from importlib import resources

from .adversary import (
    AnyVersion,
    CompromiseModel,
    ExactComponent,
    FaultScenario,
    Vulnerability,
    WholeConfiguration,
)
from .population import (
    Component,
    ComponentCategory,
    Configuration,
    Population,
    Replica,
    ValidationError,
    validate_population,
)

HUNDRED = Decimal(100)
MILLI_PERCENT_TOTAL = 100_000


@dataclass(frozen=True)
class PoolShare:
    name: str
    share_percent: Decimal

    def __post_init__(self):
        if not self.name:
            raise ValidationError("pool name must be non-empty")
        if not Decimal(0) <= self.share_percent <= HUNDRED:
            raise ValidationError(f"share for {self.name!r} outside [0, 100]: {self.share_percent}")
        if self.share_percent.as_tuple().exponent < -3:
            raise ValidationError(
                f"share for {self.name!r} has more than 3 fractional digits: {self.share_percent}"
            )

    @property
    def milli_percent(self) -> int:
        return int(self.share_percent * 1000)


def _decimal(raw, where: str) -> Decimal:
    try:
        value = raw if isinstance(raw, Decimal) else Decimal(str(raw).strip())
    except InvalidOperation:
        raise ValidationError(f"{where}: not a decimal number: {raw!r}") from None
    if not value.is_finite():
        raise ValidationError(f"{where}: not a finite number: {raw!r}")
    return value


def parse_pool_shares(text: str, format: str = "csv") -> list[PoolShare]:
    if format == "csv":
        lines = text.replace("\r\n", "\n").split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines or lines[0].strip() != "name,share_percent":
            raise ValidationError("line 1: header must be exactly 'name,share_percent'")
        rows = []
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            parts = line.split(",")
            if len(parts) != 2 or not parts[0].strip():
                raise ValidationError(f"line {lineno}: expected 'name,share_percent', got {line!r}")
            try:
                rows.append(PoolShare(parts[0].strip(), _decimal(parts[1], f"line {lineno}")))
            except ValidationError as exc:
                msg = str(exc)
                raise ValidationError(msg if msg.startswith("line") else f"line {lineno}: {msg}") from None
    elif format == "json":
        try:
            doc = json.loads(text, parse_float=Decimal)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
        if isinstance(doc, dict):
            doc = doc.get("pools")
        if not isinstance(doc, list):
            raise ValidationError("expected a JSON array of {name, share_percent} objects")
        rows = []
        for i, item in enumerate(doc):
            if not isinstance(item, dict) or set(item) != {"name", "share_percent"}:
                raise ValidationError(f"pools[{i}]: expected exactly the keys name, share_percent")
            rows.append(PoolShare(str(item["name"]), _decimal(item["share_percent"], f"pools[{i}]")))
    else:
        raise ValueError(f"format must be 'csv' or 'json', not {format!r}")

    seen = set()
    for r in rows:
        if r.name in seen:
            raise ValidationError(f"duplicate pool name {r.name!r}")
        seen.add(r.name)
    total = sum((r.share_percent for r in rows), Decimal(0))
    if total > HUNDRED:
        raise ValidationError(f"pool shares sum to {total}%, above 100%")
    return rows


def paper_pool_shares() -> list[PoolShare]:
    """The 17 Bitcoin pool shares of 2 February 2023 bundled with the package."""
    text = resources.files("replicadiv").joinpath("data/bitcoin_pools_2023-02-02.csv").read_text()
    return parse_pool_shares(text, "csv")


def _pool_configuration(name: str) -> Configuration:
    return Configuration.of(Component(ComponentCategory.APPLICATION_CONSENSUS, f"pool:{name}", "1"))


def example1_powers(shares: list[PoolShare], x: int, residual_percent=None) -> list[int]:
    """Integer powers for the pools followed by `x` equal residual miners.

    One milli-percent is `x` units, so the residual splits without remainder.
    """
    if x < 1:
        raise ValueError("residual miner count must be positive")
    pool_milli = [s.milli_percent for s in shares]
    if residual_percent is None:
        residual_milli = MILLI_PERCENT_TOTAL - sum(pool_milli)
    else:
        residual_milli = int(_decimal(residual_percent, "residual_percent") * 1000)
    if residual_milli < 0:
        raise ValidationError(f"pool shares exceed 100% (residual {residual_milli / 1000}%)")
    return [m * x for m in pool_milli] + [residual_milli] * x


def example1_population(shares: list[PoolShare], x: int, residual_percent=None) -> Population:
    """One replica per pool plus `x` residual miners, every configuration unique."""
    powers = example1_powers(shares, x, residual_percent)
    replicas = [
        Replica(f"pool-{i:02d}", s.name, _pool_configuration(s.name), p)
        for i, (s, p) in enumerate(zip(shares, powers))
    ]
    width = len(str(x))
    for j, p in enumerate(powers[len(shares):]):
        name = f"miner-{j:0{width}d}"
        replicas.append(Replica(name, name, _pool_configuration(name), p))
    return Population.from_replicas(replicas)


# --- population documents ----------------------------------------------------

_REPLICA_KEYS = {"id", "operator", "power_units", "configuration"}
_COMPONENT_KEYS = {"category", "id", "version"}


def _check_keys(obj, allowed: set[str], path: str):
    if not isinstance(obj, dict):
        raise ValidationError(f"{path}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ValidationError(f"{path}: unknown field(s) {', '.join(sorted(unknown))}")
    missing = allowed - set(obj)
    if missing:
        raise ValidationError(f"{path}: missing field(s) {', '.join(sorted(missing))}")


def _nonempty_str(value, path: str) -> str:
    if not isinstance(value, str) or not value:
        raise ValidationError(f"{path}: expected a non-empty string")
    return value


def component_from_doc(obj, path: str) -> Component:
    _check_keys(obj, _COMPONENT_KEYS, path)
    try:
        category = ComponentCategory.parse(obj["category"])
    except ValidationError as exc:
        raise ValidationError(f"{path}.category: {exc}") from None
    return Component(
        category,
        _nonempty_str(obj["id"], f"{path}.id"),
        _nonempty_str(obj["version"], f"{path}.version"),
    )


def component_to_doc(c: Component) -> dict:
    return {"category": c.category.value, "id": c.id, "version": c.version}


def configuration_from_doc(obj, path: str) -> Configuration:
    _check_keys(obj, {"components"}, path)
    comps = obj["components"]
    if not isinstance(comps, list) or not comps:
        raise ValidationError(f"{path}.components: expected a non-empty array")
    parsed = [component_from_doc(c, f"{path}.components[{i}]") for i, c in enumerate(comps)]
    config = Configuration(frozenset(parsed))
    if len(config.components) != len(parsed):
        raise ValidationError(f"{path}.components: duplicate component")
    categories = [c.category for c in parsed]
    if len(set(categories)) != len(categories):
        raise ValidationError(f"{path}.components: more than one component per category")
    return config


def replica_from_doc(obj, path: str) -> Replica:
    _check_keys(obj, _REPLICA_KEYS, path)
    power = obj["power_units"]
    if isinstance(power, bool) or not isinstance(power, int) or power < 0:
        raise ValidationError(f"{path}.power_units: expected a non-negative integer")
    return Replica(
        _nonempty_str(obj["id"], f"{path}.id"),
        _nonempty_str(obj["operator"], f"{path}.operator"),
        configuration_from_doc(obj["configuration"], f"{path}.configuration"),
        power,
    )


def replica_to_doc(r: Replica) -> dict:
    return {
        "id": r.id,
        "operator": r.operator_id,
        "power_units": r.power,
        "configuration": {
            "components": [component_to_doc(c) for c in r.configuration.sorted_components()]
        },
    }


def population_from_doc(doc, validate: bool = True) -> Population:
    _check_keys(doc, {"replicas"}, "$")
    if not isinstance(doc["replicas"], list):
        raise ValidationError("$.replicas: expected an array")
    pop = Population.from_replicas(
        replica_from_doc(r, f"$.replicas[{i}]") for i, r in enumerate(doc["replicas"])
    )
    if validate:
        report = validate_population(pop)
        if not report.ok:
            raise ValidationError(f"$.replicas: {report}")
    return pop


def load_population_spec(text: str) -> Population:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    return population_from_doc(doc)


def population_to_doc(pop: Population) -> dict:
    return {"replicas": [replica_to_doc(r) for r in sorted(pop.replicas, key=lambda r: r.id)]}


def serialize_population(pop: Population) -> str:
    return json.dumps(population_to_doc(pop), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# --- scenarios and compromise models -------------------------------------------


def target_from_doc(obj, path: str):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValidationError(f"{path}: expected an object with a 'kind'")
    kind = obj["kind"]
    if kind == "exact_component":
        _check_keys(obj, {"kind", "category", "id", "version"}, path)
        c = component_from_doc({k: obj[k] for k in _COMPONENT_KEYS}, path)
        return ExactComponent(c.category, c.id, c.version)
    if kind == "any_version":
        _check_keys(obj, {"kind", "category", "id"}, path)
        try:
            category = ComponentCategory.parse(obj["category"])
        except ValidationError as exc:
            raise ValidationError(f"{path}.category: {exc}") from None
        return AnyVersion(category, _nonempty_str(obj["id"], f"{path}.id"))
    if kind == "whole_configuration":
        _check_keys(obj, {"kind", "digest"}, path)
        return WholeConfiguration(_nonempty_str(obj["digest"], f"{path}.digest"))
    raise ValidationError(
        f"{path}.kind: unknown target kind {kind!r} "
        "(allowed: exact_component, any_version, whole_configuration)"
    )


def target_to_doc(t) -> dict:
    if isinstance(t, ExactComponent):
        return {"kind": "exact_component", "category": t.category.value, "id": t.id, "version": t.version}
    if isinstance(t, AnyVersion):
        return {"kind": "any_version", "category": t.category.value, "id": t.id}
    return {"kind": "whole_configuration", "digest": t.digest}


def load_scenario(text: str) -> FaultScenario:
    """Scenario document: `{"vulnerabilities": [{id, target}]}` or the bare array."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    if isinstance(doc, dict):
        _check_keys(doc, {"vulnerabilities"}, "$")
        doc = doc["vulnerabilities"]
    if not isinstance(doc, list):
        raise ValidationError("$.vulnerabilities: expected an array")
    vulns = []
    for i, v in enumerate(doc):
        path = f"$.vulnerabilities[{i}]"
        _check_keys(v, {"id", "target"}, path)
        vulns.append(Vulnerability(_nonempty_str(v["id"], f"{path}.id"), target_from_doc(v["target"], f"{path}.target")))
    return FaultScenario(tuple(vulns))


def serialize_scenario(scenario: FaultScenario) -> str:
    doc = {"vulnerabilities": [{"id": v.id, "target": target_to_doc(v.target)} for v in scenario.vulnerabilities]}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_compromise_model(text: str) -> CompromiseModel:
    """`{"components": [{category, id, version, probability}]}`.

    Probabilities may be JSON numbers or strings such as "1/3".
    """
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    _check_keys(doc, {"components"}, "$")
    if not isinstance(doc["components"], list):
        raise ValidationError("$.components: expected an array")
    probs = {}
    for i, item in enumerate(doc["components"]):
        path = f"$.components[{i}]"
        _check_keys(item, _COMPONENT_KEYS | {"probability"}, path)
        comp = component_from_doc({k: item[k] for k in _COMPONENT_KEYS}, path)
        raw = item["probability"]
        try:
            p = Fraction(raw) if isinstance(raw, (str, int, Decimal)) and not isinstance(raw, bool) else None
        except (ValueError, ZeroDivisionError):
            p = None
        if p is None:
            raise ValidationError(f"{path}.probability: expected a number or fraction string")
        if comp in probs:
            raise ValidationError(f"{path}: duplicate component {comp.label()}")
        if not 0 <= p <= 1:
            raise ValidationError(f"{path}.probability: outside [0, 1]")
        probs[comp] = float(p)
    return CompromiseModel(probs)
