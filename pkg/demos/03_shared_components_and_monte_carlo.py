"""Shared operating systems, the paper-literal safety sum, and sampling.

Five replicas run two operating systems and two consensus clients. A pair
of vulnerabilities that overlap on the same replicas is double counted by
the summed condition but not by the union. We then ask how likely it is,
with per-component compromise probabilities, that more than a third of the
power falls.
"""

from fractions import Fraction

from replicadiv import (
    AnyVersion,
    Component,
    ComponentCategory,
    CompromiseModel,
    Configuration,
    ExactComponent,
    FaultScenario,
    Population,
    Replica,
    Vulnerability,
    evaluate_scenario,
    min_vulnerabilities_to_break,
    monte_carlo_safety,
)

OS, APP = ComponentCategory.SYSTEM_SOFTWARE, ComponentCategory.APPLICATION_CONSENSUS
linux61, linux62, bsd = Component(OS, "linux", "6.1"), Component(OS, "linux", "6.2"), Component(OS, "freebsd", "14")
core, btcd = Component(APP, "core", "26"), Component(APP, "btcd", "0.24")

pop = Population.from_replicas([
    Replica("a", "alice", Configuration.of(linux61, core), 30),
    Replica("b", "bob", Configuration.of(linux62, core), 20),
    Replica("c", "carol", Configuration.of(bsd, core), 20),
    Replica("d", "dave", Configuration.of(bsd, btcd), 15),
    Replica("e", "erin", Configuration.of(linux61, btcd), 15),
])
f = Fraction(pop.total_power, 3)

scenario = FaultScenario((
    Vulnerability("CVE-kernel", AnyVersion(OS, "linux")),
    Vulnerability("CVE-6.1", ExactComponent(OS, "linux", "6.1")),
))
print(evaluate_scenario(pop, scenario, f).describe())

for granularity in ("component", "configuration"):
    res = min_vulnerabilities_to_break(pop, f, granularity, "exhaustive")
    print(f"{granularity}: {res.count} vulnerabilities -> {res.union_power} power")

model = CompromiseModel({linux61: 0.05, linux62: 0.05, bsd: 0.02, core: 0.01, btcd: 0.03})
print(monte_carlo_safety(pop, model, f, trials=200_000, seed=7).describe())
