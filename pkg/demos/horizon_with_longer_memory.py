"""When edges remember two steps, k_min_bar + 1 samples can be too few.

Two nodes feed each other through delay-2 terms.  Measuring node 1 up to
k = k_min_bar + 1 = 4 never exercises f_{2,1}, so the data cannot determine
it; one more sample is enough.

Run from the repository root:  python3 demos/horizon_with_longer_memory.py
"""

from netident import EdgeFunction, FunctionClassId, Network, RankDeficient, unfold, validate
from netident.estimator import EstimationProblem, design_excitations, fit_edges, recovery_error

net = Network.from_functions(2, {
    (1, 2): EdgeFunction(2, {(0, 2): 0.25}),
    (2, 1): EdgeFunction(2, {(0, 2): -0.25}),
})
rep = validate(net)
print(f"m_max={rep.m_max} diameter={rep.diameter} k_min_bar={rep.k_min_bar}")

for k in (rep.k_min_bar + 1, rep.k_min_bar + 2):
    u = unfold(net, 1, k)
    used = sorted({(dst[0], src[0]) for dst, src in u.edges})
    print(f"\nk={k}: unfolded digraph of node 1 uses edges {used}")
    prob = EstimationProblem.from_network(
        net, design_excitations(2, k, 40, seed=k), 3, FunctionClassId.ZNL_SEPARABLE)
    try:
        fit = fit_edges(prob, [1])
        print(f"  recovered, error {recovery_error(net, fit.functions):.1e}")
    except RankDeficient as exc:
        print(f"  not determined: {sorted({e for e, _ in exc.entries})}")
