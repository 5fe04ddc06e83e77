"""Replica populations: components, configurations, operators and voting power.

A population is a snapshot of every replica that holds voting power at one
point in time. Voting power is kept as exact integers so that share
equality checks later on never depend on floating point.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable


class ValidationError(ValueError):
    """Raised when a domain object is structurally invalid."""


class ComponentCategory(str, Enum):
    TRUSTED_HARDWARE = "trusted_hardware"
    SYSTEM_SOFTWARE = "system_software"
    APPLICATION_WALLET = "application_wallet"
    APPLICATION_CONSENSUS = "application_consensus"

    @classmethod
    def parse(cls, value) -> "ComponentCategory":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            allowed = ", ".join(c.value for c in cls)
            raise ValidationError(
                f"unknown component category {value!r} (allowed: {allowed})"
            ) from None


@dataclass(frozen=True, order=True)
class Component:
    category: ComponentCategory
    id: str
    version: str

    def key(self) -> tuple[str, str, str]:
        return (self.category.value, self.id, self.version)

    def label(self) -> str:
        return f"{self.category.value}:{self.id}:{self.version}"


@dataclass(frozen=True)
class Configuration:
    """A set of components, at most one per category.

    Construction does not validate; `digest` raises `ValidationError` for
    malformed sets and `validate_population` reports them in bulk.
    """

    components: frozenset[Component]

    @classmethod
    def of(cls, *components: Component) -> "Configuration":
        return cls(frozenset(components))

    @cached_property
    def digest(self) -> str:
        return canonical_digest(self)

    def component_in(self, category: ComponentCategory) -> Component | None:
        for c in self.components:
            if c.category is category:
                return c
        return None

    def sorted_components(self) -> list[Component]:
        return sorted(self.components, key=Component.key)


def configuration_problems(configuration: Configuration) -> list[str]:
    problems = []
    if not configuration.components:
        problems.append("empty component set")
    seen = Counter()
    for c in configuration.components:
        if not isinstance(c.category, ComponentCategory):
            problems.append(f"invalid category {c.category!r}")
            continue
        seen[c.category] += 1
        if not isinstance(c.id, str) or not c.id:
            problems.append(f"empty component id in {c.category.value}")
        if not isinstance(c.version, str) or not c.version:
            problems.append(f"empty component version in {c.category.value}")
    for category, n in sorted(seen.items(), key=lambda kv: kv[0].value):
        if n > 1:
            problems.append(f"duplicate category {category.value}")
    return problems


def canonical_digest(configuration: Configuration) -> str:
    """SHA-256 over the JSON encoding of the sorted component triples."""
    problems = configuration_problems(configuration)
    if problems:
        raise ValidationError("; ".join(problems))
    encoded = json.dumps(
        [list(c.key()) for c in configuration.sorted_components()],
        separators=(",", ":"),
        ensure_ascii=False,
    )
    return hashlib.sha256(encoded.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Replica:
    id: str
    operator_id: str
    configuration: Configuration
    power: int


@dataclass(frozen=True)
class Population:
    """Immutable replica snapshot; replicas are kept sorted by id."""

    replicas: tuple[Replica, ...] = field(default_factory=tuple)

    def __post_init__(self):
        ordered = tuple(sorted(self.replicas, key=lambda r: r.id))
        object.__setattr__(self, "replicas", ordered)

    @classmethod
    def from_replicas(cls, replicas: Iterable[Replica]) -> "Population":
        return cls(tuple(replicas))

    @property
    def total_power(self) -> int:
        return sum(r.power for r in self.replicas)

    def __len__(self):
        return len(self.replicas)

    def __iter__(self):
        return iter(self.replicas)

    def power_by_configuration(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.replicas:
            d = r.configuration.digest
            out[d] = out.get(d, 0) + r.power
        return out


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __str__(self):
        if self.ok:
            return "ok"
        return "; ".join(f"{v.kind}[{v.subject}]: {v.message}" for v in self.violations)


def validate_population(pop: Population) -> ValidationReport:
    """Collect every structural problem instead of stopping at the first."""
    violations: list[Violation] = []
    if not pop.replicas:
        violations.append(Violation("empty_population", "", "population has no replicas"))
    counts = Counter(r.id for r in pop.replicas)
    for rid, n in sorted(counts.items()):
        if n > 1:
            violations.append(
                Violation("duplicate_replica_id", rid, f"replica id {rid!r} used {n} times")
            )
    for r in pop.replicas:
        if not isinstance(r.id, str) or not r.id:
            violations.append(Violation("empty_replica_id", repr(r.id), "replica id is empty"))
        if not isinstance(r.operator_id, str) or not r.operator_id:
            violations.append(Violation("empty_operator_id", str(r.id), "operator id is empty"))
        if isinstance(r.power, bool) or not isinstance(r.power, int) or r.power < 0:
            violations.append(
                Violation("invalid_power", str(r.id), f"power must be a non-negative integer, got {r.power!r}")
            )
        for problem in configuration_problems(r.configuration):
            violations.append(Violation("malformed_component", str(r.id), problem))
    if pop.replicas and all(isinstance(r.power, int) for r in pop.replicas) and pop.total_power <= 0:
        violations.append(Violation("zero_total_power", "", "total voting power is zero"))
    return ValidationReport(tuple(violations))


def require_valid(pop: Population) -> Population:
    report = validate_population(pop)
    if not report.ok:
        raise ValidationError(str(report))
    return pop
