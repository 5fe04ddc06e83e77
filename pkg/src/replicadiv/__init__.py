"""Replica diversity and fault-independence analysis."""

from .adversary import (
    AnyVersion,
    AttackResult,
    CompromiseModel,
    ExactComponent,
    FaultScenario,
    SafetyVerdict,
    Vulnerability,
    WholeConfiguration,
    abundance_resilience_table,
    affected_power,
    evaluate_scenario,
    kappa_omega_population,
    min_operator_corruptions,
    min_vulnerabilities_to_break,
    monte_carlo_safety,
)
from .diversity import (
    ABSENT,
    BY_CONFIGURATION,
    BY_OPERATOR,
    AbundanceReport,
    Distribution,
    Grouping,
    abundance_report,
    by_component,
    distribution_of,
    entropy_bits,
    is_kappa_omega_optimal,
    is_kappa_optimal,
    max_entropy_bits,
    merge_groups,
)
from .ingest import (
    PoolShare,
    example1_population,
    load_population_spec,
    paper_pool_shares,
    parse_pool_shares,
    serialize_population,
)
from .population import (
    Component,
    ComponentCategory,
    Configuration,
    Population,
    Replica,
    ValidationError,
    canonical_digest,
    validate_population,
)
from .registry import AttestationRecord, AttestationRegistry, EquivocationError

__version__ = "0.1.0"
