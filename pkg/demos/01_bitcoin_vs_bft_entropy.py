"""Best-case entropy of Bitcoin mining power versus an 8-replica BFT system.

Every pool is assumed to run its own configuration, and the mining power
not attributed to the 17 largest pools is spread evenly over x miners.
Even at x = 1000 the entropy stays below the 3 bits of a uniform 8-node
deployment.
"""

from replicadiv import distribution_of, entropy_bits, example1_population, paper_pool_shares
from replicadiv.cli import figure1_rows
from replicadiv.diversity import BY_CONFIGURATION

from _common import make_uniform

shares = paper_pool_shares()
print(f"{len(shares)} pools hold {sum(s.share_percent for s in shares)}% of the hash rate")

rows = figure1_rows(shares, 1000)
for x, miners, h in rows[::111]:
    print(f"x={x:5d} miners={miners:5d} entropy={h:.6f} bits")

bft = distribution_of(make_uniform(8), BY_CONFIGURATION)
print(f"uniform 8-replica BFT: {entropy_bits(bft):.6f} bits")

# The same number through the full population model, at x = 101 (118 miners).
pop = example1_population(shares, 101)
print(f"118-miner population: {entropy_bits(distribution_of(pop, BY_CONFIGURATION)):.6f} bits")

# matplotlib is optional; rendering is left to whoever runs this.
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    xs, _, hs = zip(*rows)
    plt.plot(xs, hs)
    plt.axhline(3.0, linestyle="--")
    plt.xlabel("miners sharing the residual power")
    plt.ylabel("entropy (bits)")
    plt.savefig("figure1.png", dpi=120)
    print("wrote figure1.png")
