"""A hand-built 12-node mesh whose single-message flood can be checked hop by hop.

Links are tuned so every transfer takes exactly 100 ms: a 2000-byte window
that cannot grow over a 2 ms RTT gives 1000 B/ms per link, and bandwidth is
high enough never to bind. With a 10 ms processing delay a hop therefore
lands at 101, 212, 323 and 434 ms.
"""
from typing import List, Set, Tuple

from gossipsim.Services.Metrics.MetricsLedger import MetricsLedger
from gossipsim.Services.Protocol.MeshParams import MeshParams, ProtocolFeatures
from gossipsim.Services.Topology.network import Network
from gossipsim.Services.Transport.Simulator import Simulator
from gossipsim.Services.Transport.TransportParams import TransportParams

# D=3 mesh, nodes A..L
GOLDEN_NODES = 'ABCDEFGHIJKL'
GOLDEN_EDGES = [
    'AB', 'AG', 'AL', 'BC', 'BK', 'CD', 'CI', 'DE', 'DJ',
    'EK', 'EH', 'FG', 'FL', 'FJ', 'GH', 'HI', 'IJ', 'KL',
]
GOLDEN_SIZE = 100_000
GOLDEN_PUBLISHER = GOLDEN_NODES.index('A')

Edge = Tuple[int, int]


def golden_edge_list() -> List[Edge]:
    return [(GOLDEN_NODES.index(a), GOLDEN_NODES.index(b)) for a, b in GOLDEN_EDGES]


def round_oracle(network: Network, publisher: int, idontwant: bool) -> Tuple[Set[Edge], Set[Edge]]:
    """Transmissions and suppressions of a round-synchronous flood.

    A node first reached in round r forwards in round r to every mesh peer it
    did not hear the message from. With IDONTWANT it also skips peers first
    reached in round r or earlier.
    """
    first_round = {publisher: 0}
    senders = {publisher: set()}
    frontier = [publisher]
    sent, suppressed = set(), set()
    r = 0
    while frontier:
        reached = {}
        for v in frontier:
            for u in network.mesh[v]:
                if u in senders[v]:
                    continue
                if idontwant and first_round.get(u, r + 1) <= r:
                    suppressed.add((v, u))
                    continue
                sent.add((v, u))
                if u not in first_round:
                    reached.setdefault(u, set()).add(v)
        r += 1
        for u, who in reached.items():
            first_round[u] = r
            senders[u] = who
        frontier = sorted(reached)
    return sent, suppressed


def simulate_golden(idontwant: bool) -> Tuple[Network, MetricsLedger]:
    network = Network.from_edges(12, golden_edge_list(), latency_ms=1.0, bandwidth_mbps=1e4)
    sim = Simulator(
        network,
        MeshParams(d=3, d_low=3, d_high=3, d_out=1, d_lazy=0, gossip_factor=0.0),
        features=ProtocolFeatures(idontwant=idontwant),
        transport=TransportParams(mss=1000, initial_window=2, max_cwnd=2000, processing_delay=10),
        seed=1,
        trace=True,
    )
    return network, sim.run([(0.0, GOLDEN_PUBLISHER, GOLDEN_SIZE)])
