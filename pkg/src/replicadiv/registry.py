"""Simulated configuration-discovery registry.

Replicas report attested configurations per epoch. Records are trusted as
authentic; the registry only enforces one record per (replica, epoch) and
builds point-in-time population snapshots from the latest record of each
replica.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .diversity import BY_CONFIGURATION, Distribution, distribution_of, merge_groups
from .ingest import population_to_doc, replica_from_doc, replica_to_doc
from .population import Configuration, Population, Replica, ValidationError

OTHER = "OTHER"


class EquivocationError(ValidationError):
    """Two different records for the same replica and epoch."""


@dataclass(frozen=True)
class AttestationRecord:
    replica_id: str
    operator_id: str
    configuration: Configuration
    power: int
    epoch: int

    def __post_init__(self):
        if not self.replica_id or not self.operator_id:
            raise ValidationError("replica_id and operator_id must be non-empty")
        if isinstance(self.epoch, bool) or not isinstance(self.epoch, int) or self.epoch < 0:
            raise ValidationError(f"epoch must be a non-negative integer, got {self.epoch!r}")
        if isinstance(self.power, bool) or not isinstance(self.power, int) or self.power < 0:
            raise ValidationError(f"power must be a non-negative integer, got {self.power!r}")
        self.configuration.digest  # raises on malformed configurations

    def replica(self) -> Replica:
        return Replica(self.replica_id, self.operator_id, self.configuration, self.power)

    def to_doc(self) -> dict:
        return {"epoch": self.epoch, "replica": replica_to_doc(self.replica())}

    @classmethod
    def from_doc(cls, doc, path: str = "$") -> "AttestationRecord":
        if not isinstance(doc, dict) or set(doc) != {"epoch", "replica"}:
            raise ValidationError(f"{path}: expected exactly the keys epoch, replica")
        r = replica_from_doc(doc["replica"], f"{path}.replica")
        return cls(r.id, r.operator_id, r.configuration, r.power, doc["epoch"])


@dataclass(frozen=True)
class RegistrySnapshot:
    epoch: int
    population: Population


class AttestationRegistry:
    """Single-writer registry; snapshots are immutable copies."""

    def __init__(self):
        self._records: dict[tuple[str, int], AttestationRecord] = {}
        self._lock = threading.Lock()

    def register(self, record: AttestationRecord) -> bool:
        """Store `record`. Returns False if an identical record already existed."""
        key = (record.replica_id, record.epoch)
        with self._lock:
            existing = self._records.get(key)
            if existing is not None:
                if existing != record:
                    raise EquivocationError(
                        f"replica {record.replica_id!r} already registered a different "
                        f"record at epoch {record.epoch}"
                    )
                return False
            self._records[key] = record
            return True

    def records(self) -> list[AttestationRecord]:
        with self._lock:
            return sorted(self._records.values(), key=lambda r: (r.epoch, r.replica_id))

    def snapshot(self, epoch: int) -> RegistrySnapshot:
        latest: dict[str, AttestationRecord] = {}
        for rec in self.records():
            if rec.epoch <= epoch:
                latest[rec.replica_id] = rec
        return RegistrySnapshot(epoch, Population.from_replicas(r.replica() for r in latest.values()))

    def anonymized_distribution(self, epoch: int, min_group_power_share) -> Distribution:
        """Configuration shares by digest, small groups pooled under OTHER."""
        threshold = Fraction(min_group_power_share)
        pop = self.snapshot(epoch).population
        if not pop.replicas or pop.total_power <= 0:
            raise ValidationError(f"snapshot at epoch {epoch} has no voting power")
        raw = distribution_of(pop, BY_CONFIGURATION)
        return merge_groups(raw, anonymizing_map(raw, threshold))

    # persistence: latest population document + append-only epoch log

    def save(self, directory) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        records = self.records()
        with open(directory / "epochs.jsonl", "w", encoding="utf-8", newline="\n") as fh:
            for rec in records:
                fh.write(json.dumps(rec.to_doc(), sort_keys=True) + "\n")
        latest_epoch = max((r.epoch for r in records), default=0)
        doc = population_to_doc(self.snapshot(latest_epoch).population)
        (directory / "population.json").write_text(
            json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, directory) -> "AttestationRegistry":
        reg = cls()
        log = Path(directory) / "epochs.jsonl"
        if not log.exists():
            return reg
        for lineno, line in enumerate(log.read_text(encoding="utf-8").splitlines(), start=1):
            if line.strip():
                reg.register(AttestationRecord.from_doc(json.loads(line), f"epochs.jsonl:{lineno}"))
        return reg


def anonymizing_map(dist: Distribution, threshold: Fraction) -> dict[str, str]:
    return {ident: (OTHER if share < threshold else ident) for ident, share in dist.entries}
