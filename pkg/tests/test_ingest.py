import json
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from replicadiv import (
    Component,
    ComponentCategory,
    Configuration,
    FaultScenario,
    Population,
    Replica,
    ValidationError,
    Vulnerability,
    example1_population,
    load_population_spec,
    paper_pool_shares,
    parse_pool_shares,
    serialize_population,
)
from replicadiv.adversary import AnyVersion, ExactComponent, WholeConfiguration
from replicadiv.diversity import BY_CONFIGURATION, distribution_of
from replicadiv.ingest import (
    PoolShare,
    load_compromise_model,
    load_scenario,
    serialize_scenario,
)

from conftest import SS


def test_parse_two_pools():
    rows = parse_pool_shares("name,share_percent\nFoundry,34.239\nAntPool,19.981")
    assert rows == [PoolShare("Foundry", Decimal("34.239")), PoolShare("AntPool", Decimal("19.981"))]


def test_parse_crlf():
    assert len(parse_pool_shares("name,share_percent\r\nA,1\r\nB,2\r\n")) == 2


def test_parse_over_unity_rejected():
    with pytest.raises(ValidationError, match="above 100"):
        parse_pool_shares("name,share_percent\nA,50.000\nB,50.001\n")


def test_parse_header_only():
    assert parse_pool_shares("name,share_percent\n") == []


@pytest.mark.parametrize(
    "body,match",
    [
        ("A,1\nB\n", "line 3"),
        ("A,abc\n", "line 2"),
        ("A,1.2345\n", "line 2"),
        ("A,1\nA,2\n", "duplicate"),
        ("A,-1\n", "line 2"),
    ],
)
def test_parse_errors(body, match):
    with pytest.raises(ValidationError, match=match):
        parse_pool_shares("name,share_percent\n" + body)


def test_parse_bad_header():
    with pytest.raises(ValidationError, match="header"):
        parse_pool_shares("pool,share\nA,1\n")


def test_parse_json():
    text = '[{"name": "A", "share_percent": 34.239}, {"name": "B", "share_percent": "0.1"}]'
    rows = parse_pool_shares(text, "json")
    assert rows[0].share_percent == Decimal("34.239")
    assert rows[1].milli_percent == 100


def test_paper_shares_bundle():
    shares = paper_pool_shares()
    assert len(shares) == 17
    assert shares[0].share_percent == Decimal("34.239")
    assert sum(s.share_percent for s in shares) == Decimal("99.145")


def test_example1_sizes():
    shares = paper_pool_shares()
    assert len(example1_population(shares, 101)) == 118
    pop = example1_population(shares, 1)
    assert len(pop) == 18
    residual = [r for r in pop if r.id.startswith("miner")]
    assert residual[0].power == 855
    assert pop.total_power == 100_000


def test_example1_paper_literal_residual():
    pop = example1_population(paper_pool_shares(), 1, residual_percent="0.87")
    assert [r.power for r in pop if r.id.startswith("miner")] == [870]


def test_example1_full_shares_zero_residual():
    shares = [PoolShare("A", Decimal("60")), PoolShare("B", Decimal("40"))]
    pop = example1_population(shares, 5)
    assert len(pop) == 7
    dist = distribution_of(pop, BY_CONFIGURATION)
    assert dist.support_size == 2


def test_example1_negative_residual():
    shares = [PoolShare("A", Decimal("60")), PoolShare("B", Decimal("40"))]
    with pytest.raises(ValidationError):
        example1_population(shares, 1, residual_percent="-1")
    # direct over-unity input
    with pytest.raises(ValidationError):
        example1_population([PoolShare("A", Decimal("100")), PoolShare("B", Decimal("0.5"))], 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 1000))
def test_example1_total_exact(x):
    pop = example1_population(paper_pool_shares(), x)
    assert pop.total_power == 100_000 * x
    assert len({r.power for r in pop if r.id.startswith("miner")}) == 1


MINIMAL = json.dumps({"replicas": [{"id": "r1", "operator": "o1", "power_units": 5, "configuration": {
    "components": [{"category": "system_software", "id": "linux", "version": "6.1"}]}}]})


def test_load_minimal():
    pop = load_population_spec(MINIMAL)
    assert len(pop) == 1 and pop.total_power == 5


def test_load_duplicate_id_named():
    doc = json.loads(MINIMAL)
    doc["replicas"].append(doc["replicas"][0])
    with pytest.raises(ValidationError, match="r1"):
        load_population_spec(json.dumps(doc))


def test_load_unknown_category():
    bad = MINIMAL.replace("system_software", "firmware")
    with pytest.raises(ValidationError, match="trusted_hardware.*system_software.*application_wallet.*application_consensus"):
        load_population_spec(bad)


@pytest.mark.parametrize(
    "mutate,match",
    [
        (lambda d: d["replicas"][0].update(extra=1), r"\$\.replicas\[0\].*extra"),
        (lambda d: d["replicas"][0].update(power_units=-1), "power_units"),
        (lambda d: d["replicas"][0].update(power_units=1.5), "power_units"),
        (lambda d: d["replicas"][0]["configuration"]["components"].clear(), "components"),
        (lambda d: d.update(meta={}), "meta"),
        (lambda d: d["replicas"][0].pop("operator"), "operator"),
    ],
)
def test_load_schema_errors(mutate, match):
    doc = json.loads(MINIMAL)
    mutate(doc)
    with pytest.raises(ValidationError, match=match):
        load_population_spec(json.dumps(doc))


def test_load_zero_total_power():
    with pytest.raises(ValidationError, match="zero"):
        load_population_spec(MINIMAL.replace('"power_units": 5', '"power_units": 0'))


def test_serialize_deterministic_and_round_trip():
    pop = example1_population(paper_pool_shares(), 101)
    text = serialize_population(pop)
    assert serialize_population(pop) == text
    again = load_population_spec(text)
    assert again == pop
    assert serialize_population(again) == text
    assert len(again) == 118


cats = st.sampled_from(list(ComponentCategory))
ident = st.text(st.characters(codec="utf-8", exclude_categories=("Cs",)), min_size=1, max_size=6)


@st.composite
def populations(draw):
    n = draw(st.integers(1, 8))
    ids = draw(st.lists(ident, min_size=n, max_size=n, unique=True))
    replicas = []
    for rid in ids:
        chosen = draw(st.lists(cats, min_size=1, max_size=4, unique=True))
        comps = frozenset(Component(c, draw(ident), draw(ident)) for c in chosen)
        replicas.append(Replica(rid, draw(ident), Configuration(comps), draw(st.integers(0, 10**12))))
    if sum(r.power for r in replicas) == 0:
        r = replicas[0]
        replicas[0] = Replica(r.id, r.operator_id, r.configuration, 1)
    return Population.from_replicas(replicas)


@given(populations())
def test_round_trip_property(pop):
    text = serialize_population(pop)
    loaded = load_population_spec(text)
    assert loaded == pop
    assert serialize_population(loaded) == text


def test_scenario_round_trip():
    s = FaultScenario((
        Vulnerability("v1", ExactComponent(SS, "linux", "6.1")),
        Vulnerability("v2", AnyVersion(SS, "linux")),
        Vulnerability("v3", WholeConfiguration("abc")),
    ))
    assert load_scenario(serialize_scenario(s)) == s
    bare = json.dumps(json.loads(serialize_scenario(s))["vulnerabilities"])
    assert load_scenario(bare) == s


def test_scenario_unknown_kind():
    with pytest.raises(ValidationError, match="kind"):
        load_scenario('[{"id": "v", "target": {"kind": "firmware"}}]')


def test_model_parsing():
    text = json.dumps({"components": [
        {"category": "system_software", "id": "linux", "version": "6.1", "probability": "1/4"},
        {"category": "application_wallet", "id": "core", "version": "1", "probability": 0.5},
    ]})
    model = load_compromise_model(text)
    assert model.probabilities[Component(SS, "linux", "6.1")] == 0.25
    with pytest.raises(ValidationError):
        load_compromise_model(text.replace("0.5", "1.5"))
