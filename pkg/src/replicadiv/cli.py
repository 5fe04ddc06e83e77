"""Command-line front end.

Exit codes: 0 success (or safe), 1 input/validation failure, 2 safety
condition violated.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from fractions import Fraction

from . import adversary, diversity, ingest
from .population import ValidationError
from .registry import AttestationRecord, AttestationRegistry

EXIT_OK, EXIT_INPUT, EXIT_UNSAFE = 0, 1, 2


def read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


def write_output(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def fmt12(x: float) -> str:
    return f"{x:.12g}"


def load_any_population(path: str, fmt: str):
    text = read_input(path)
    if not text.strip():
        raise ValidationError(f"{path}: empty input")
    if fmt == "population":
        return ingest.load_population_spec(text)
    shares = ingest.parse_pool_shares(text, fmt)
    if not shares:
        raise ValidationError(f"{path}: no pool shares")
    return ingest.example1_population(shares, 1)


def cmd_entropy(args) -> int:
    pop = load_any_population(args.input, args.format)
    dist = diversity.distribution_of(pop, diversity.Grouping.parse(args.grouping))
    h = diversity.entropy_bits(dist)
    support = dist.support_size
    hmax = diversity.max_entropy_bits(support)
    optimal = str(diversity.is_kappa_optimal(dist, support)).lower()
    print(f"entropy_bits={h:.12f} support={support} max={hmax:.12f} kappa_optimal={optimal}")
    if args.csv:
        print("entropy_bits,support,max_entropy_bits,kappa_optimal")
        print(f"{fmt12(h)},{support},{fmt12(hmax)},{optimal}")
    return EXIT_OK


def figure1_rows(shares, x_max: int):
    """(x, total_miners, entropy_bits) for x = 1..x_max."""
    rows = []
    for x in range(1, x_max + 1):
        powers = ingest.example1_powers(shares, x)
        rows.append((x, len(shares) + x, diversity.entropy_from_powers(powers)))
    return rows


def figure1_csv(shares, x_max: int) -> str:
    buf = io.StringIO()
    buf.write("x,total_miners,entropy_bits\n")
    for x, n, h in figure1_rows(shares, x_max):
        buf.write(f"{x},{n},{fmt12(h)}\n")
    return buf.getvalue()


def cmd_figure1(args) -> int:
    if args.x_max < 1:
        raise ValidationError("--x-max must be at least 1")
    if args.pools:
        shares = ingest.parse_pool_shares(read_input(args.pools), args.format)
    else:
        shares = ingest.paper_pool_shares()
    write_output(args.out, figure1_csv(shares, args.x_max))
    return EXIT_OK


def _parse_threshold(text: str):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"--f must be a number of power units, got {text!r}") from None
    if value < 0:
        raise ValidationError("--f must be non-negative")
    return int(value) if value.denominator == 1 else value


def cmd_check(args) -> int:
    pop = ingest.load_population_spec(read_input(args.input))
    scenario = ingest.load_scenario(read_input(args.scenario))
    verdict = adversary.evaluate_scenario(pop, scenario, _parse_threshold(args.f))
    print(verdict.describe())
    return EXIT_OK if verdict.union_condition_holds else EXIT_UNSAFE


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise ValidationError("--trials must be at least 1")
    pop = ingest.load_population_spec(read_input(args.input))
    model = ingest.load_compromise_model(read_input(args.model))
    result = adversary.monte_carlo_safety(
        pop, model, _parse_threshold(args.f), args.trials, args.seed, workers=args.workers
    )
    print(result.describe() + f" seed={args.seed}")
    return EXIT_OK


def cmd_prop3(args) -> int:
    if args.kappa_max < 1 or args.omega_max < 1:
        raise ValidationError("--kappa-max and --omega-max must be at least 1")
    try:
        alpha = Fraction(args.alpha)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"--alpha must be a fraction, got {args.alpha!r}") from None
    if not 0 <= alpha <= 1:
        raise ValidationError("--alpha must lie in [0, 1]")
    kappas = range(1, args.kappa_max + 1)
    omegas = range(1, args.omega_max + 1)
    if args.total_power is None:
        total = alpha.denominator
        for k in kappas:
            for w in omegas:
                total = math.lcm(total, k * w)
    else:
        total = args.total_power
    cells = adversary.abundance_resilience_table(kappas, omegas, total, alpha)
    buf = io.StringIO()
    buf.write("kappa,omega,min_corruptions\n")
    for c in cells:
        value = "unbreakable" if c.min_corruptions is None else str(c.min_corruptions)
        buf.write(f"{c.kappa},{c.omega},{value}\n")
    write_output(args.out, buf.getvalue())
    return EXIT_OK


def cmd_registry(args) -> int:
    reg = AttestationRegistry.load(args.state)
    if args.action == "register":
        import json

        doc = json.loads(read_input(args.record))
        docs = doc if isinstance(doc, list) else [doc]
        for i, d in enumerate(docs):
            reg.register(AttestationRecord.from_doc(d, f"$[{i}]"))
        reg.save(args.state)
        print(f"registered={len(docs)} records={len(reg.records())}")
    elif args.action == "snapshot":
        snap = reg.snapshot(args.epoch)
        sys.stdout.write(ingest.serialize_population(snap.population))
    else:
        dist = reg.anonymized_distribution(args.epoch, Fraction(args.min_share))
        print("identity,share,share_float")
        for ident, share in dist.entries:
            print(f"{ident},{share},{fmt12(float(share))}")
        print(f"# entropy_bits={fmt12(diversity.entropy_bits(dist))}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="replicadiv", description="Replica diversity and fault-independence analysis")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("entropy", help="entropy and kappa-optimality of a population")
    e.add_argument("--input", required=True)
    e.add_argument("--format", choices=["csv", "json", "population"], default="population")
    e.add_argument("--grouping", default="configuration")
    e.add_argument("--csv", action="store_true", help="also print a CSV record")
    e.set_defaults(func=cmd_entropy)

    f1 = sub.add_parser("figure1", help="best-case Bitcoin entropy versus residual miner count")
    f1.add_argument("--pools", help="pool share file (defaults to the bundled 2023-02-02 data)")
    f1.add_argument("--format", choices=["csv", "json"], default="csv")
    f1.add_argument("--x-max", type=int, default=1000)
    f1.add_argument("--out", default="-")
    f1.set_defaults(func=cmd_figure1)

    c = sub.add_parser("check", help="evaluate a fault scenario against threshold f")
    c.add_argument("--input", required=True)
    c.add_argument("--f", required=True)
    c.add_argument("--scenario", required=True)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("simulate", help="Monte-Carlo probability of exceeding f")
    s.add_argument("--input", required=True)
    s.add_argument("--model", required=True)
    s.add_argument("--f", required=True)
    s.add_argument("--trials", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    p3 = sub.add_parser("prop3", help="operator corruptions needed per (kappa, omega)")
    p3.add_argument("--kappa-max", type=int, required=True)
    p3.add_argument("--omega-max", type=int, required=True)
    p3.add_argument("--alpha", default="1/2")
    p3.add_argument("--total-power", type=int)
    p3.add_argument("--out", default="-")
    p3.set_defaults(func=cmd_prop3)

    r = sub.add_parser("registry", help="simulated attestation registry")
    r.add_argument("--state", required=True, help="registry state directory")
    rsub = r.add_subparsers(dest="action", required=True)
    rr = rsub.add_parser("register")
    rr.add_argument("--record", required=True)
    rs = rsub.add_parser("snapshot")
    rs.add_argument("--epoch", type=int, required=True)
    ra = rsub.add_parser("anonymize")
    ra.add_argument("--epoch", type=int, required=True)
    ra.add_argument("--min-share", default="0")
    r.set_defaults(func=cmd_registry)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
