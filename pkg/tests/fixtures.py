"""Small hand-built networks shared across test modules."""

from netident import EdgeFunction, Network

SQ = EdgeFunction(1, {(2,): 1.0})


def six_node_network() -> Network:
    """Cycle 1->2->3->4->1 with chord 1->3, fed by 5 directly and through 6."""
    sq = lambda c: EdgeFunction(1, {(2,): c})  # noqa: E731
    return Network.from_functions(6, {
        (1, 4): sq(0.3),
        (2, 1): EdgeFunction(1, {(2,): -0.2, (3,): 0.1}),
        (2, 5): sq(0.25),
        (3, 1): EdgeFunction(1, {(3,): 0.2}),
        (3, 2): sq(-0.15),
        (3, 6): sq(0.1),
        (4, 3): sq(0.3),
        (6, 5): EdgeFunction(1, {(3,): -0.25}),
    })


def bridge_network(a1: float = 0.4, a2: float = -0.3) -> Network:
    """Source 1 splits into 2 and 3, which meet at hub 4 through linear edges."""
    return Network.from_functions(4, {
        (2, 1): EdgeFunction(1, {(2,): 0.3}),
        (3, 1): EdgeFunction(1, {(2,): 0.1, (3,): 0.2}),
        (4, 2): EdgeFunction(1, {(1,): a1}),
        (4, 3): EdgeFunction(1, {(1,): a2}),
    })


def example_dag() -> Network:
    """Edges 1->2, 2->3, 1->3 with f21 = x^2, f32 = x^3, f31 = x1 x2 + x2^2."""
    return Network.from_functions(3, {
        (2, 1): SQ,
        (3, 2): EdgeFunction(1, {(3,): 1.0}),
        (3, 1): EdgeFunction(2, {(1, 1): 1.0, (0, 2): 1.0}),
    })
