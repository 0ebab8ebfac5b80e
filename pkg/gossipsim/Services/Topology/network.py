"""Seeded overlay construction: the full-message mesh and its link parameters."""
import logging
import os
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import networkx as nx

from gossipsim.exceptions import ConfigError, TopologyError
from gossipsim.Services.Protocol.MeshParams import MeshParams
from gossipsim.Services.rng import SeededRNG

logger = logging.getLogger(__name__)

DEFAULT_LATENCY_MS = 100.0
DEFAULT_BANDWIDTH_MBPS = 50.0


@dataclass(frozen=True)
class Network:
    n_nodes: int
    mesh: Tuple[Tuple[int, ...], ...]
    latency_ms: float = DEFAULT_LATENCY_MS
    bandwidth_mbps: float = DEFAULT_BANDWIDTH_MBPS

    def latency(self, u: int, v: int) -> float:
        return self.latency_ms

    @property
    def bandwidth_bytes_per_ms(self) -> float:
        # the same rate applies to uplink and downlink
        return self.bandwidth_mbps * 1000 / 8

    def degree(self, node: int) -> int:
        return len(self.mesh[node])

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return sorted((u, v) for u, peers in enumerate(self.mesh) for v in peers if u < v)

    def to_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_nodes))
        graph.add_edges_from(self.edges)
        return graph

    @classmethod
    def from_edges(
        cls,
        n_nodes: int,
        edges: Iterable[Tuple[int, int]],
        latency_ms: float = DEFAULT_LATENCY_MS,
        bandwidth_mbps: float = DEFAULT_BANDWIDTH_MBPS,
    ) -> 'Network':
        adjacency = [set() for _ in range(n_nodes)]
        for u, v in edges:
            if u == v or not (0 <= u < n_nodes and 0 <= v < n_nodes):
                raise TopologyError('edges', f'invalid edge ({u}, {v})')
            adjacency[u].add(v)
            adjacency[v].add(u)
        mesh = tuple(tuple(sorted(peers)) for peers in adjacency)
        return cls(n_nodes=n_nodes, mesh=mesh, latency_ms=latency_ms, bandwidth_mbps=bandwidth_mbps)

    def write_edge_list(self, path: str) -> None:
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            for u, v in self.edges:
                f.write(f'{u} {v}\n')


def _candidate_graph(n_nodes: int, degree: int, d_high: int, seed: int) -> nx.Graph:
    if degree == n_nodes - 1:
        return nx.complete_graph(n_nodes)
    if (n_nodes * degree) % 2 == 0:
        return nx.random_regular_graph(degree, n_nodes, seed=seed)
    # odd stub count: one node takes an extra (or one fewer) edge
    sequence = [degree] * n_nodes
    sequence[-1] = degree + 1 if degree + 1 <= min(d_high, n_nodes - 1) else degree - 1
    return nx.random_degree_sequence_graph(sequence, seed=seed, tries=50)


def build_network(
    n_nodes: int,
    params: MeshParams,
    seed: int,
    latency_ms: float = DEFAULT_LATENCY_MS,
    bandwidth_mbps: float = DEFAULT_BANDWIDTH_MBPS,
    max_retries: int = 20,
) -> Network:
    """Random connected mesh, approximately d-regular, with every degree in [d_low, d_high].

    Small networks clamp the bounds to n-1 so that N <= d still yields a
    (near) complete graph.
    """
    if n_nodes < 2:
        raise ConfigError('n_nodes', f'need at least 2 nodes, got {n_nodes}')
    if latency_ms < 0:
        raise ConfigError('link_latency', 'must be >= 0')
    if bandwidth_mbps <= 0:
        raise ConfigError('bandwidth_mbps', 'must be > 0')

    degree = min(params.d, n_nodes - 1)
    low = min(params.d_low, n_nodes - 1)
    high = params.d_high
    rng = SeededRNG(seed)

    for attempt in range(1, max_retries + 1):
        graph_seed = rng.derive_seed()
        try:
            graph = _candidate_graph(n_nodes, degree, high, graph_seed)
        except nx.NetworkXException as e:
            logger.warning('Mesh attempt %d/%d failed: %s', attempt, max_retries, e)
            continue
        degrees = [d for _, d in graph.degree()]
        if min(degrees) < low or max(degrees) > high:
            logger.warning('Mesh attempt %d/%d violates degree bounds', attempt, max_retries)
            continue
        if not nx.is_connected(graph):
            logger.warning('Mesh attempt %d/%d is disconnected, rebuilding', attempt, max_retries)
            continue
        return Network.from_edges(n_nodes, graph.edges(), latency_ms, bandwidth_mbps)

    raise TopologyError('n_nodes', f'no connected mesh with degrees in [{low}, {high}] after {max_retries} attempts')


def diameter_estimate(n_nodes: int, degree: int) -> int:
    """Hop count H = ceil(log N / log d), evaluated exactly as the smallest H with d**H >= N."""
    if n_nodes < 1:
        raise ConfigError('nodes', 'must be >= 1')
    if degree < 2:
        raise ConfigError('degree', 'must be >= 2')
    hops = 0
    reach = 1
    while reach < n_nodes:
        reach *= degree
        hops += 1
    return hops
