"""Three ways to build two different networks that look the same from the measured nodes.

Run from the repository root:  python3 demos/forging_pairs.py
"""

from pathlib import Path

import numpy as np

from netident import (
    EdgeFunction,
    Network,
    Univariate,
    forge_arborescence_shift,
    forge_gamma_split,
    forge_linear_superposition,
    load_network,
    verify_indistinguishable,
)

HERE = Path(__file__).parent


def show(title, pair):
    res = verify_indistinguishable(pair, trials=200)
    print(f"\n{title}")
    for edge in pair.changed_edges():
        print(f"  f{edge}: {pair.original[edge]}  ->  {pair.alternative[edge]}")
    print(f"  measured {sorted(pair.measured)}: {'indistinguishable' if res else 'distinguishable'}"
          f" (max gap {res.max_discrepancy:.1e} over {res.trials} plans)")


# a constant can move between two edges entering the same node; no measurement sees it
dag = load_network(HERE / "networks" / "three_node_dag.net")
show("constant moved between edges into node 3", forge_gamma_split(dag, 3, 1, 2, 0.7))

# in a chain, shifting node 2 and undoing the shift downstream hides node 2 completely
chain = load_network(HERE / "networks" / "chain.net")
pair = forge_arborescence_shift(chain, 2, 0.5)
show("node 2 offset by 0.5 and compensated downstream", pair)
print("  but node 2 itself moves by exactly 0.5:")
gap = verify_indistinguishable(type(pair)(pair.original, pair.alternative, frozenset({2}), None), trials=5)
print(f"    {gap.max_discrepancy:.15f}")

# two linear hub edges only see a weighted sum of the branches
bridge = load_network(HERE / "networks" / "bridge.net")
a1, a2 = bridge[(4, 2)].terms[0][1], bridge[(4, 3)].terms[0][1]
delta = Univariate({2: 0.2, 3: 0.1})
show(f"branch functions traded in ratio a2/a1 = {a2 / a1:g}",
     forge_linear_superposition(bridge, 4, 2, 3, a1, a2, delta))

# a corrupted alternative is caught, with a witness
bad = dag.replace({(3, 2): EdgeFunction(1, {(3,): 1.001})})
res = verify_indistinguishable(type(pair)(dag, bad, frozenset({3}), None))
w = res.witness
print(f"\ncorrupted alternative: {'PASS' if res else 'FAIL'} at node {w.node}, k={w.k}, gap {w.discrepancy:.2e}")
