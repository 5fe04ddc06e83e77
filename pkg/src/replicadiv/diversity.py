"""Entropy-based diversity metrics over replica populations.

Shares are exact `Fraction`s of total voting power. Entropy is reported in
bits and evaluated in floating point from those exact shares.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import numpy as np

from .population import (
    ComponentCategory,
    Population,
    ValidationError,
    require_valid,
)

ABSENT = "ABSENT"


@dataclass(frozen=True)
class Grouping:
    """How replicas are bucketed before computing shares.

    kind is one of "configuration", "operator" or "component"; the
    component grouping also carries the category it looks at.
    """

    kind: str
    category: ComponentCategory | None = None

    def __post_init__(self):
        if self.kind not in ("configuration", "operator", "component"):
            raise ValueError(f"unknown grouping kind {self.kind!r}")
        if (self.kind == "component") != (self.category is not None):
            raise ValueError("component grouping requires a category (and only it)")

    @classmethod
    def parse(cls, text: str) -> "Grouping":
        if text in ("configuration", "operator"):
            return cls(text)
        if text.startswith("component:"):
            return cls("component", ComponentCategory.parse(text.split(":", 1)[1]))
        raise ValueError(
            f"unknown grouping {text!r}; use configuration, operator or component:CATEGORY"
        )

    def key_for(self, replica) -> str:
        if self.kind == "configuration":
            return replica.configuration.digest
        if self.kind == "operator":
            return replica.operator_id
        c = replica.configuration.component_in(self.category)
        return ABSENT if c is None else f"{c.id}:{c.version}"


BY_CONFIGURATION = Grouping("configuration")
BY_OPERATOR = Grouping("operator")


def by_component(category) -> Grouping:
    return Grouping("component", ComponentCategory.parse(category))


@dataclass(frozen=True)
class Distribution:
    entries: tuple[tuple[str, Fraction], ...]

    def __post_init__(self):
        ids = [i for i, _ in self.entries]
        if len(set(ids)) != len(ids):
            raise ValidationError("distribution identities must be unique")
        for ident, share in self.entries:
            if not isinstance(share, Fraction):
                raise ValidationError(f"share for {ident!r} must be a Fraction")
            if share < 0 or share > 1:
                raise ValidationError(f"share for {ident!r} outside [0, 1]: {share}")
        if sum((s for _, s in self.entries), Fraction(0)) != 1:
            raise ValidationError("shares must sum to exactly 1")

    @classmethod
    def from_weights(cls, weights: Mapping[str, int | Fraction]) -> "Distribution":
        total = sum(weights.values())
        if total <= 0:
            raise ValidationError("total weight must be positive")
        return cls(tuple((k, Fraction(weights[k]) / total) for k in sorted(weights)))

    @property
    def support_size(self) -> int:
        return sum(1 for _, s in self.entries if s != 0)

    def nonzero_shares(self) -> list[Fraction]:
        return [s for _, s in self.entries if s != 0]

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.entries)

    def __len__(self):
        return len(self.entries)


def distribution_of(pop: Population, grouping: Grouping = BY_CONFIGURATION) -> Distribution:
    """Power-weighted shares of each group in `pop`."""
    require_valid(pop)
    weights: dict[str, int] = {}
    for r in pop.replicas:
        key = grouping.key_for(r)
        weights[key] = weights.get(key, 0) + r.power
    return Distribution.from_weights(weights)


def _is_uniform(shares: list[Fraction]) -> bool:
    return all(s == shares[0] for s in shares)


def entropy_bits(dist: Distribution) -> float:
    """Shannon entropy in bits; zero shares contribute nothing.

    Uniform distributions return exactly log2(support).
    """
    shares = dist.nonzero_shares()
    if not shares:
        return 0.0
    if _is_uniform(shares):
        return math.log2(len(shares))
    terms = []
    for s in shares:
        p = s.numerator / s.denominator
        # log2(1/p) from the exact integers avoids cancellation near p = 1
        terms.append(p * (math.log2(s.denominator) - math.log2(s.numerator)))
    return math.fsum(terms)


def entropy_from_powers(powers) -> float:
    """Entropy in bits of an integer power vector, each entry its own group."""
    w = np.asarray(powers, dtype=np.float64)
    w = w[w > 0]
    if w.size == 0:
        raise ValidationError("total power must be positive")
    total = w.sum()
    p = w / total
    return float(-(p * np.log2(p)).sum())


def max_entropy_bits(support: int) -> float:
    if support < 1:
        raise ValueError("support must be at least 1")
    return math.log2(support)


@dataclass(frozen=True)
class AbundanceEntry:
    replica_count: int
    power_share: Fraction


@dataclass(frozen=True)
class AbundanceReport:
    entries: dict[str, AbundanceEntry]

    @property
    def total_configurations(self) -> int:
        return len(self.entries)

    def counts(self) -> list[int]:
        """Replica counts, largest first."""
        return sorted((e.replica_count for e in self.entries.values()), reverse=True)


def abundance_report(pop: Population) -> AbundanceReport:
    require_valid(pop)
    counts = Counter(r.configuration.digest for r in pop.replicas)
    power = pop.power_by_configuration()
    total = pop.total_power
    entries = {
        d: AbundanceEntry(counts[d], Fraction(power[d], total)) for d in sorted(counts)
    }
    return AbundanceReport(entries)


def is_kappa_optimal(dist: Distribution, kappa: int) -> bool:
    """Exactly `kappa` nonzero shares, all rationally equal."""
    if kappa < 1:
        raise ValueError("kappa must be positive")
    shares = dist.nonzero_shares()
    return len(shares) == kappa and _is_uniform(shares)


def is_kappa_omega_optimal(pop: Population, kappa: int, omega: int) -> bool:
    if kappa < 1 or omega < 1:
        raise ValueError("kappa and omega must be positive")
    if not is_kappa_optimal(distribution_of(pop, BY_CONFIGURATION), kappa):
        return False
    counts = Counter(r.configuration.digest for r in pop.replicas)
    power = pop.power_by_configuration()
    return all(counts[d] == omega for d, p in power.items() if p > 0)


def merge_groups(
    dist: Distribution, mapping: Mapping[str, str] | Callable[[str], str]
) -> Distribution:
    """Relabel identities and sum the shares of those that collide."""
    lookup = mapping if callable(mapping) else mapping.__getitem__
    merged: dict[str, Fraction] = {}
    for ident, share in dist.entries:
        try:
            target = lookup(ident)
        except KeyError:
            raise ValidationError(f"mapping has no entry for {ident!r}") from None
        merged[target] = merged.get(target, Fraction(0)) + share
    return Distribution(tuple((k, merged[k]) for k in sorted(merged)))


def distribution_from_shares(shares: Iterable[Fraction | int], prefix: str = "g") -> Distribution:
    """Convenience: unnamed weights (normalized) as a distribution."""
    shares = list(shares)
    width = len(str(len(shares)))
    return Distribution.from_weights(
        {f"{prefix}{i:0{width}d}": Fraction(s) for i, s in enumerate(shares)}
    )
