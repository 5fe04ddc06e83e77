"""Vulnerability and operator adversaries against a replica population.

Thresholds `f` are voting-power amounts. The paper-literal safety check sums
the power hit by each vulnerability; the union check counts each replica
once. Attack searches report the smallest set that pushes compromised power
strictly above `f`.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .population import (
    Component,
    ComponentCategory,
    Configuration,
    Population,
    Replica,
    ValidationError,
    require_valid,
)

EXHAUSTIVE_LIMIT = 20
MC_BLOCK = 4096


@dataclass(frozen=True)
class ExactComponent:
    category: ComponentCategory
    id: str
    version: str

    def matches(self, configuration: Configuration) -> bool:
        return Component(self.category, self.id, self.version) in configuration.components

    def identity(self) -> str:
        return f"component:{self.category.value}:{self.id}:{self.version}"


@dataclass(frozen=True)
class AnyVersion:
    category: ComponentCategory
    id: str

    def matches(self, configuration: Configuration) -> bool:
        c = configuration.component_in(self.category)
        return c is not None and c.id == self.id

    def identity(self) -> str:
        return f"anyversion:{self.category.value}:{self.id}"


@dataclass(frozen=True)
class WholeConfiguration:
    digest: str

    def matches(self, configuration: Configuration) -> bool:
        return configuration.digest == self.digest

    def identity(self) -> str:
        return f"configuration:{self.digest}"


VulnerabilityTarget = ExactComponent | AnyVersion | WholeConfiguration


@dataclass(frozen=True)
class Vulnerability:
    id: str
    target: VulnerabilityTarget


@dataclass(frozen=True)
class FaultScenario:
    vulnerabilities: tuple[Vulnerability, ...] = ()

    def __post_init__(self):
        ids = [v.id for v in self.vulnerabilities]
        if len(set(ids)) != len(ids):
            raise ValidationError("vulnerability ids must be unique within a scenario")
        if any(not v.id for v in self.vulnerabilities):
            raise ValidationError("vulnerability id must be non-empty")

    @property
    def k(self) -> int:
        return len(self.vulnerabilities)


@dataclass(frozen=True)
class SafetyVerdict:
    per_vulnerability_power: tuple[tuple[str, int], ...]
    sum_affected: int
    union_affected: int
    threshold_f: int | Fraction

    @property
    def paper_condition_holds(self) -> bool:
        return self.threshold_f >= self.sum_affected

    @property
    def union_condition_holds(self) -> bool:
        return self.threshold_f >= self.union_affected

    def describe(self) -> str:
        lines = [f"{vid}: {p}" for vid, p in self.per_vulnerability_power]
        lines.append(
            f"union_affected={self.union_affected} f={self.threshold_f} "
            f"safe={str(self.union_condition_holds).lower()}"
        )
        lines.append(
            f"sum_affected={self.sum_affected} (paper-literal) "
            f"paper_condition={str(self.paper_condition_holds).lower()}"
        )
        return "\n".join(lines)


def _matching(pop: Population, target) -> list[Replica]:
    return [r for r in pop.replicas if target.matches(r.configuration)]


def affected_power(pop: Population, v: Vulnerability) -> int:
    require_valid(pop)
    return sum(r.power for r in _matching(pop, v.target))


def evaluate_scenario(pop: Population, scenario: FaultScenario, f) -> SafetyVerdict:
    require_valid(pop)
    per = []
    hit: set[str] = set()
    for v in scenario.vulnerabilities:
        matched = _matching(pop, v.target)
        per.append((v.id, sum(r.power for r in matched)))
        hit.update(r.id for r in matched)
    union = sum(r.power for r in pop.replicas if r.id in hit)
    return SafetyVerdict(tuple(per), sum(p for _, p in per), union, f)


# --- attack searches -------------------------------------------------------


@dataclass(frozen=True)
class AttackResult:
    """Outcome of a minimal-attack search.

    `count` is None when the adversary cannot exceed `f` at all.
    """

    count: int | None
    chosen: tuple
    union_power: int

    @property
    def unbreakable(self) -> bool:
        return self.count is None


def candidate_targets(pop: Population, granularity: str) -> list:
    if granularity == "configuration":
        digests = {r.configuration.digest for r in pop.replicas}
        targets = [WholeConfiguration(d) for d in digests]
    elif granularity == "component":
        comps = {c for r in pop.replicas for c in r.configuration.components}
        targets = [ExactComponent(c.category, c.id, c.version) for c in comps]
    else:
        raise ValueError(f"granularity must be 'component' or 'configuration', not {granularity!r}")
    return sorted(targets, key=lambda t: t.identity())


def _target_sets(pop: Population, targets) -> list[frozenset[int]]:
    return [
        frozenset(i for i, r in enumerate(pop.replicas) if t.matches(r.configuration))
        for t in targets
    ]


def _power_of(indices: Iterable[int], powers: Sequence[int]) -> int:
    return sum(powers[i] for i in indices)


def min_vulnerabilities_to_break(
    pop: Population, f, granularity: str = "configuration", mode: str = "greedy"
) -> AttackResult:
    """Fewest distinct vulnerabilities whose union of hit power exceeds `f`."""
    require_valid(pop)
    if mode not in ("greedy", "exhaustive"):
        raise ValueError(f"mode must be 'greedy' or 'exhaustive', not {mode!r}")
    targets = candidate_targets(pop, granularity)
    if mode == "exhaustive" and len(targets) > EXHAUSTIVE_LIMIT:
        raise ValueError(
            f"exhaustive search limited to {EXHAUSTIVE_LIMIT} targets, got {len(targets)}"
        )
    sets = _target_sets(pop, targets)
    powers = [r.power for r in pop.replicas]
    everything = frozenset().union(*sets) if sets else frozenset()
    if _power_of(everything, powers) <= f:
        return AttackResult(None, (), _power_of(everything, powers))

    if mode == "greedy":
        chosen: list[int] = []
        covered: set[int] = set()
        union = 0
        while union <= f:
            # targets are sorted by identity, so max() keeps the smallest on ties
            best = max(
                (i for i in range(len(targets)) if i not in chosen),
                key=lambda i: _power_of(sets[i] - covered, powers),
            )
            chosen.append(best)
            covered |= sets[best]
            union = _power_of(covered, powers)
        return AttackResult(len(chosen), tuple(targets[i] for i in chosen), union)

    for size in range(1, len(targets) + 1):
        best_combo, best_power = None, -1
        for combo in itertools.combinations(range(len(targets)), size):
            p = _power_of(frozenset().union(*(sets[i] for i in combo)), powers)
            if p > f and p > best_power:
                best_combo, best_power = combo, p
        if best_combo is not None:
            return AttackResult(size, tuple(targets[i] for i in best_combo), best_power)
    raise AssertionError("unreachable: full target set exceeds f")


def operator_powers(pop: Population) -> dict[str, int]:
    out: dict[str, int] = {}
    for r in pop.replicas:
        out[r.operator_id] = out.get(r.operator_id, 0) + r.power
    return out


def min_operator_corruptions(pop: Population, f) -> AttackResult:
    """Fewest operators whose combined power exceeds `f`.

    Taking operators largest-first is exact for a sum threshold.
    """
    require_valid(pop)
    ops = sorted(operator_powers(pop).items(), key=lambda kv: (-kv[1], kv[0]))
    total = sum(p for _, p in ops)
    if total <= f:
        return AttackResult(None, (), total)
    acc, chosen = 0, []
    for name, p in ops:
        chosen.append(name)
        acc += p
        if acc > f:
            break
    return AttackResult(len(chosen), tuple(chosen), acc)


# --- Monte-Carlo -------------------------------------------------------------


@dataclass(frozen=True)
class CompromiseModel:
    """Independent per-component probability of an exploitable fault."""

    probabilities: Mapping[Component, float]

    def __post_init__(self):
        for c, p in self.probabilities.items():
            if not 0 <= p <= 1:
                raise ValidationError(f"probability for {c.label()} outside [0, 1]: {p}")

    def components(self) -> list[Component]:
        return sorted(self.probabilities, key=Component.key)


@dataclass(frozen=True)
class MonteCarloResult:
    estimate: float
    half_width: float
    violations: int
    trials: int

    def describe(self) -> str:
        return (
            f"p_violation={self.estimate:.6f} half_width={self.half_width:.6f} "
            f"violations={self.violations} trials={self.trials}"
        )


def _atoms(pop: Population, components: list[Component]):
    """Collapse replicas sharing the same modelled-component signature."""
    index = {c: i for i, c in enumerate(components)}
    power: dict[tuple[int, ...], int] = {}
    for r in pop.replicas:
        sig = tuple(sorted(index[c] for c in r.configuration.components if c in index))
        if sig:
            power[sig] = power.get(sig, 0) + r.power
    sigs = sorted(power)
    incidence = np.zeros((len(components), len(sigs)), dtype=np.int64)
    for j, sig in enumerate(sigs):
        incidence[list(sig), j] = 1
    return incidence, np.array([power[s] for s in sigs], dtype=np.int64)


def _block_violations(seed: int, block: int, n: int, probs, incidence, atom_power, f) -> int:
    bitgen = np.random.Philox(key=seed & (2**64 - 1), counter=[0, 0, 0, block])
    draws = np.random.Generator(bitgen).random((n, len(probs)))
    compromised = (draws < probs).astype(np.int64)
    hit = (compromised @ incidence) > 0
    hit_power = hit.astype(np.int64) @ atom_power
    return int(np.count_nonzero(hit_power > f))


def monte_carlo_safety(
    pop: Population,
    model: CompromiseModel,
    f,
    trials: int,
    seed: int,
    workers: int = 1,
) -> MonteCarloResult:
    """Estimate P(union of compromised replica power > f).

    Trial t draws from a Philox stream keyed by `seed` at block t // 4096,
    so the result depends only on (seed, trials), not on `workers`.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    require_valid(pop)
    components = model.components()
    probs = np.array([model.probabilities[c] for c in components], dtype=np.float64)
    incidence, atom_power = _atoms(pop, components)
    threshold = float(f) if isinstance(f, Fraction) else f

    blocks = [(b, min(MC_BLOCK, trials - b * MC_BLOCK)) for b in range(math.ceil(trials / MC_BLOCK))]

    def run(block):
        b, n = block
        if len(components) == 0:
            return n if 0 > threshold else 0
        return _block_violations(seed, b, n, probs, incidence, atom_power, threshold)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            violations = sum(ex.map(run, blocks))
    else:
        violations = sum(map(run, blocks))
    estimate = violations / trials
    half_width = 1.96 * math.sqrt(estimate * (1 - estimate) / trials)
    return MonteCarloResult(estimate, half_width, violations, trials)


# --- configuration abundance vs. operator resilience --------------------------


def kappa_omega_population(kappa: int, omega: int, total_power: int) -> Population:
    """κ configurations × ω replicas, one operator per replica, equal power."""
    if kappa < 1 or omega < 1:
        raise ValueError("kappa and omega must be positive")
    if total_power % (kappa * omega):
        raise ValidationError(
            f"total_power {total_power} not divisible by kappa*omega = {kappa * omega}"
        )
    each = total_power // (kappa * omega)
    replicas = []
    for k in range(kappa):
        config = Configuration.of(Component(ComponentCategory.SYSTEM_SOFTWARE, f"os{k}", "1"))
        for w in range(omega):
            rid = f"k{k:03d}-w{w:03d}"
            replicas.append(Replica(rid, f"op-{rid}", config, each))
    return Population.from_replicas(replicas)


@dataclass(frozen=True)
class ResilienceCell:
    kappa: int
    omega: int
    min_corruptions: int | None


def abundance_resilience_table(
    kappas: Iterable[int], omegas: Iterable[int], total_power: int, alpha
) -> list[ResilienceCell]:
    """Operator corruptions needed to exceed alpha × total, per (κ, ω)."""
    alpha = Fraction(alpha)
    omegas = list(omegas)
    f = alpha * total_power
    cells = []
    for k in kappas:
        for w in omegas:
            pop = kappa_omega_population(k, w, total_power)
            cells.append(ResilienceCell(k, w, min_operator_corruptions(pop, f).count))
    return cells
