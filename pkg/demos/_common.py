from replicadiv import Component, ComponentCategory, Configuration, Population, Replica


def make_uniform(n, power=1, omega=1):
    """n configurations x omega replicas, one operator each."""
    replicas = []
    for k in range(n):
        cfg = Configuration.of(Component(ComponentCategory.SYSTEM_SOFTWARE, f"os{k}", "1"))
        for w in range(omega):
            replicas.append(Replica(f"r{k}-{w}", f"op{k}-{w}", cfg, power))
    return Population.from_replicas(replicas)
