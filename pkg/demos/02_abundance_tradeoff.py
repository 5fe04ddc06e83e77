"""Configuration abundance: useless against exploits, useful against operators.

In a (kappa, omega)-optimal system one exploited configuration always hands
the attacker 1/kappa of the voting power, whatever omega is. Corrupting
operators is another matter: more replicas per configuration means more
operators have to be bribed before the attacker passes the threshold.
"""

from fractions import Fraction

from replicadiv import (
    Vulnerability,
    WholeConfiguration,
    abundance_resilience_table,
    affected_power,
    is_kappa_omega_optimal,
    kappa_omega_population,
)

KAPPA, TOTAL = 4, 240
alpha = Fraction(1, 2)

print("omega  exploit_share  operators_needed")
for cell in abundance_resilience_table([KAPPA], range(1, 6), TOTAL, alpha):
    pop = kappa_omega_population(KAPPA, cell.omega, TOTAL)
    assert is_kappa_omega_optimal(pop, KAPPA, cell.omega)
    digest = pop.replicas[0].configuration.digest
    hit = affected_power(pop, Vulnerability("zero-day", WholeConfiguration(digest)))
    print(f"{cell.omega:5d}  {Fraction(hit, TOTAL)!s:>13}  {cell.min_corruptions:16d}")
