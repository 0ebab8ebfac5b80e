import pytest

from gossipsim.Services.Metrics.MetricsLedger import MetricsLedger
from gossipsim.Services.Protocol.GossipRouter import GossipRouter
from gossipsim.Services.Protocol.MeshParams import MeshParams, ProtocolFeatures
from gossipsim.Services.Protocol.NodeState import KnownPeers, MessageCache, NodeState
from gossipsim.Services.rng import SeededRNG
from gossipsim.Services.scenario_service import validate_config

KIB = 1024


def make_node(peer, mesh, n_nodes, params=None, seed=7):
    params = params or MeshParams()
    mesh = tuple(sorted(mesh))
    return NodeState(
        peer=peer,
        mesh=mesh,
        known=KnownPeers(n_nodes, peer, mesh),
        rng=SeededRNG(seed),
        mcache=MessageCache(params.gossip_window, params.history_length),
    )


class RouterHarness:
    """A router plus a handful of hand-wired nodes."""

    def __init__(self, n_nodes=20, params=None, features=None, processing_delay=0.0):
        self.n_nodes = n_nodes
        self.params = params or MeshParams()
        self.features = features or ProtocolFeatures()
        self.ledger = MetricsLedger(n_nodes)
        self.router = GossipRouter(self.params, self.features, self.ledger, id_seed=1,
                                   processing_delay=processing_delay)

    def node(self, peer, mesh, seed=7):
        return make_node(peer, mesh, self.n_nodes, self.params, seed)

    def publish(self, size, publisher=19, mesh=(0, 1, 2, 3, 4, 5, 6, 7), now=0.0):
        """Publish from a side node and return the units it produced."""
        node = self.node(publisher, mesh)
        self.router.publish(node, size, now)
        return [node.mcache.get(mid) for mid in node.mcache.window()]


@pytest.fixture
def harness():
    return RouterHarness


def small_config(**overrides):
    data = {
        'name': 'small',
        'seed': 3,
        'n_nodes': 30,
        'n_publishers': 3,
        'message_size': 32 * KIB,
        'inter_message_delay': 500.0,
        'warmup_count': 0,
    }
    data.update(overrides)
    return validate_config(data)


@pytest.fixture
def tiny_config():
    return small_config
