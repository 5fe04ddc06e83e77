"""Configuration discovery through a (simulated) attestation registry.

Replicas report configurations each epoch; an upgrade at epoch 1 changes
the measured diversity. Publishing only large groups hides rare (and
therefore easily targeted) configurations at a measurable entropy cost.
"""

from fractions import Fraction

from replicadiv import (
    AttestationRecord,
    AttestationRegistry,
    Component,
    ComponentCategory,
    Configuration,
    distribution_of,
    entropy_bits,
)
from replicadiv.diversity import BY_CONFIGURATION

OS = ComponentCategory.SYSTEM_SOFTWARE
reg = AttestationRegistry()
versions = ["6.1", "6.1", "6.1", "6.2", "14", "14", "13", "12"]
for i, v in enumerate(versions):
    name = "linux" if v.startswith("6") else "freebsd"
    reg.register(AttestationRecord(f"r{i}", f"op{i}", Configuration.of(Component(OS, name, v)), 10 + i, 0))
# two replicas upgrade at epoch 1
for i in (0, 1):
    reg.register(AttestationRecord(f"r{i}", f"op{i}", Configuration.of(Component(OS, "linux", "6.6")), 10 + i, 1))

for epoch in (0, 1):
    pop = reg.snapshot(epoch).population
    raw = entropy_bits(distribution_of(pop, BY_CONFIGURATION))
    anon = reg.anonymized_distribution(epoch, Fraction(15, 100))
    print(f"epoch {epoch}: raw {raw:.4f} bits, published {entropy_bits(anon):.4f} bits "
          f"({len(anon)} groups, OTHER={anon.as_dict().get('OTHER', 0)})")
