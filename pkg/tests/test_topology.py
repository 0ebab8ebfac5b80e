import networkx as nx
import pytest

from gossipsim.exceptions import ConfigError, TopologyError
from gossipsim.Services.Protocol.MeshParams import MeshParams
from gossipsim.Services.Topology.network import Network, build_network, diameter_estimate


def test_large_mesh_respects_degree_bounds():
    params = MeshParams()
    network = build_network(1000, params, seed=11)
    degrees = [network.degree(v) for v in range(1000)]
    assert min(degrees) >= params.d_low
    assert max(degrees) <= params.d_high
    assert nx.is_connected(network.to_graph())


def test_mesh_is_symmetric():
    network = build_network(200, MeshParams(), seed=2)
    for u, peers in enumerate(network.mesh):
        for v in peers:
            assert u in network.mesh[v]


def test_small_network_is_near_complete():
    network = build_network(10, MeshParams(), seed=1)
    assert all(network.degree(v) == 8 for v in range(10))
    assert nx.is_connected(network.to_graph())


def test_tiny_network_clamps_to_complete_graph():
    network = build_network(5, MeshParams(), seed=1)
    assert all(network.degree(v) == 4 for v in range(5))


def test_odd_stub_count_gets_one_irregular_node():
    params = MeshParams(d=3, d_low=3, d_high=4, d_out=1)
    network = build_network(13, params, seed=4)
    degrees = sorted(network.degree(v) for v in range(13))
    assert degrees == [3] * 12 + [4]


def test_same_seed_same_mesh():
    assert build_network(300, MeshParams(), seed=8).edges == build_network(300, MeshParams(), seed=8).edges
    assert build_network(300, MeshParams(), seed=8).edges != build_network(300, MeshParams(), seed=9).edges


def test_rejects_single_node():
    with pytest.raises(ConfigError) as e:
        build_network(1, MeshParams(), seed=0)
    assert e.value.field == 'n_nodes'


def test_rejects_bad_edges():
    with pytest.raises(TopologyError):
        Network.from_edges(3, [(0, 3)])
    with pytest.raises(TopologyError):
        Network.from_edges(3, [(1, 1)])


def test_edge_list_file(tmp_path):
    network = Network.from_edges(4, [(2, 1), (0, 1), (3, 2)])
    path = tmp_path / 'edges.txt'
    network.write_edge_list(str(path))
    assert path.read_text(encoding='utf-8') == '0 1\n1 2\n2 3\n'


def test_link_parameters():
    network = Network.from_edges(2, [(0, 1)], latency_ms=100.0, bandwidth_mbps=50.0)
    assert network.latency(0, 1) == 100.0
    assert network.bandwidth_bytes_per_ms == 6250.0


@pytest.mark.parametrize('nodes,degree,hops', [(1000, 8, 4), (8, 8, 1), (10000, 8, 5), (1, 8, 0), (9, 3, 2)])
def test_diameter_estimate(nodes, degree, hops):
    assert diameter_estimate(nodes, degree) == hops
