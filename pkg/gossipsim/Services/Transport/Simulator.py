"""Discrete-event engine driving the router over the flow-level transport.

Every event is a simpy process that waits out its delay and then runs one
handler. The run stops at quiescence (every message reached every node, no
publication, delivery, control message or forward timer pending and no
transfer active) or at the first event past the horizon.
"""
import logging
from typing import Iterable, List, Optional, Tuple

import simpy

from gossipsim.exceptions import ConfigError, SimulationInvariantError
from gossipsim.Services.Metrics.MetricsLedger import MetricsLedger
from gossipsim.Services.Protocol.GossipRouter import GossipRouter
from gossipsim.Services.Protocol.MeshParams import MeshParams, ProtocolFeatures
from gossipsim.Services.Protocol.NodeState import KnownPeers, MessageCache, NodeState
from gossipsim.Services.Protocol.actions import ArmTimer, Gossip, SendControl, StartTransfer, TimerKind
from gossipsim.Services.Protocol.messages import ControlKind, ControlRpc, Message
from gossipsim.Services.Topology.network import Network
from gossipsim.Services.Transport.CongestionControlInterface import CongestionControlInterface
from gossipsim.Services.Transport.FlowScheduler import FlowScheduler, Transfer
from gossipsim.Services.Transport.SlowStartCongestionControl import SlowStartCongestionControl
from gossipsim.Services.Transport.TransportParams import TransportParams
from gossipsim.Services.Transport.UnboundedCongestionControl import UnboundedCongestionControl
from gossipsim.Services.rng import SeededRNG

logger = logging.getLogger(__name__)

# (time ms, publisher, size bytes)
Publication = Tuple[float, int, int]


class Simulator:
    def __init__(
        self,
        network: Network,
        mesh_params: MeshParams,
        features: Optional[ProtocolFeatures] = None,
        transport: Optional[TransportParams] = None,
        seed: int = 0,
        horizon: Optional[float] = None,
        warmup_count: int = 0,
        trace: bool = False,
    ):
        self.network = network
        self.params = mesh_params
        self.features = features or ProtocolFeatures()
        self.transport = transport or TransportParams()
        self.seed = seed
        self.horizon = horizon
        self.rng = SeededRNG(seed)

        self.ledger = MetricsLedger(network.n_nodes, warmup_count, self.transport.framing_overhead, trace)
        self.router = GossipRouter(
            mesh_params,
            self.features,
            self.ledger,
            id_seed=seed,
            framing_overhead=self.transport.framing_overhead,
            processing_delay=self.transport.processing_delay,
        )
        self.nodes: List[NodeState] = [
            NodeState(
                peer=peer,
                mesh=network.mesh[peer],
                known=KnownPeers(network.n_nodes, peer, network.mesh[peer]),
                rng=self.rng.fork(),
                mcache=MessageCache(mesh_params.gossip_window, mesh_params.history_length),
            )
            for peer in range(network.n_nodes)
        ]

        self.env = simpy.Environment()
        self.stopped = self.env.event()
        self.scheduler = FlowScheduler(
            self.env,
            self._congestion_control(),
            uplink=network.bandwidth_bytes_per_ms,
            downlink=network.bandwidth_bytes_per_ms,
            latency=network.latency,
            on_complete=self._on_transfer_complete,
            fire=self._fire,
        )
        self.end_time = 0.0
        self.events_processed = 0
        self.pending_publications = 0
        # publications, deliveries, control messages and forward timers still queued
        self.pending_work = 0
        self.truncated = False

    @property
    def now(self) -> float:
        return self.env.now

    def _congestion_control(self) -> CongestionControlInterface:
        if self.transport.cwnd_model:
            return SlowStartCongestionControl(self.transport)
        return UnboundedCongestionControl(self.transport)

    # scheduling

    def schedule(self, delay: float, handler, *args, work: bool = False) -> simpy.Process:
        """Run ``handler(*args)`` after ``delay`` ms as its own process."""
        if work:
            self.pending_work += 1
        return self.env.process(self._after(delay, handler, args, work))

    def _after(self, delay: float, handler, args: tuple, work: bool):
        yield self.env.timeout(delay)
        if work:
            self.pending_work -= 1
        self._fire(handler, *args)

    def _fire(self, handler, *args) -> None:
        if self.stopped.triggered:
            return
        if self.horizon is not None and self.env.now > self.horizon:
            self.truncated = True
            self.stopped.succeed()
            return
        handler(*args)
        self.end_time = self.env.now
        self.events_processed += 1
        if self._quiescent():
            self.stopped.succeed()

    def _quiescent(self) -> bool:
        return (
            self.pending_publications == 0
            and self.pending_work == 0
            and self.scheduler.active_count == 0
            and self.ledger.all_complete()
        )

    # main loop

    def run(self, publications: Iterable[Publication]) -> MetricsLedger:
        for at, publisher, size in publications:
            if not 0 <= publisher < self.network.n_nodes:
                raise SimulationInvariantError(f'publisher {publisher} outside the network')
            if size <= 0:
                raise ConfigError('message_size', f'must be > 0, got {size}')
            self.schedule(at, self._on_publish, publisher, size, work=True)
            self.pending_publications += 1

        interval = self.params.heartbeat_interval
        for node in self.nodes:
            self.schedule(node.rng.uniform(0, interval), self._on_heartbeat, node.peer)

        logger.info('Simulating %d nodes, %d publications', self.network.n_nodes, self.pending_publications)
        # heartbeats keep the queue populated, so the run always ends on the stop event
        self.env.run(until=self.stopped)

        self.ledger.complete = self.pending_publications == 0 and self.ledger.all_complete()
        if self.ledger.complete:
            logger.info('Run complete at %.1f ms after %d events', self.end_time, self.events_processed)
        else:
            logger.warning('Run incomplete at %.1f ms: %d of %d deliveries',
                           self.end_time, self.ledger.completed, self.ledger.expected_completions)
        return self.ledger

    # event handlers

    def _on_publish(self, publisher: int, size: int) -> None:
        self.pending_publications -= 1
        self._execute(self.router.publish(self.nodes[publisher], size, self.now))

    def _on_transfer_complete(self, transfer: Transfer) -> None:
        self.scheduler.finish(transfer, self.now)
        link = transfer.link
        job = transfer.job
        self.ledger.record_payload_sent(job.message, link.src, link.dst)
        self.schedule(link.tau_p, self._on_deliver, link.dst, job.message, link.src, job.via_iwant, work=True)
        self._execute(self.router.on_transfer_complete(self.nodes[link.src], job, self.now))

    def _on_deliver(self, dst: int, msg: Message, src: int, via_iwant: bool) -> None:
        self.ledger.record_payload_received(msg, src, dst)
        self._execute(self.router.handle_message_received(self.nodes[dst], msg, src, self.now, via_iwant))

    def _on_control(self, dst: int, rpc: ControlRpc, src: int) -> None:
        self.ledger.record_control_received(rpc, src, dst)
        node = self.nodes[dst]
        if rpc.kind is ControlKind.IDONTWANT:
            for msg_id in rpc.ids:
                self.router.handle_idontwant(node, msg_id, src, self.now)
        elif rpc.kind is ControlKind.IHAVE:
            self._execute(self.router.handle_ihave(node, rpc.ids, src, self.now))
        else:
            self._execute(self.router.handle_iwant(node, rpc.ids, src, self.now))

    def _on_heartbeat(self, peer: int) -> None:
        self._execute(self.router.heartbeat(self.nodes[peer], self.now))
        self.schedule(self.params.heartbeat_interval, self._on_heartbeat, peer)

    def _on_stagger_timeout(self, peer: int, token: int) -> None:
        self._execute(self.router.on_stagger_timeout(self.nodes[peer], token, self.now))

    def _on_forward(self, peer: int, msg: Message) -> None:
        self._execute(self.router.on_forward_timer(self.nodes[peer], msg, self.now))

    # action execution

    def _execute(self, actions: list) -> None:
        for action in actions:
            if isinstance(action, StartTransfer):
                job = action.job
                self.ledger.record_transfer_start(job.message, action.src, job.target, self.now, job.via_iwant)
                self.scheduler.start(job, action.src, self.now)
            elif isinstance(action, SendControl):
                self._send_control(action.src, action.dst, action.rpc)
            elif isinstance(action, Gossip):
                self._send_gossip(action)
            elif isinstance(action, ArmTimer):
                self._arm_timer(action)
            else:
                raise SimulationInvariantError(f'unknown action {action!r}')

    def _send_control(self, src: int, dst: int, rpc: ControlRpc) -> None:
        self.ledger.record_control_sent(rpc, src, dst)
        self.schedule(self.network.latency(src, dst), self._on_control, dst, rpc, src, work=True)

    def _send_gossip(self, action: Gossip) -> None:
        rpc = action.rpc
        for dst in action.targets:
            seen = self.nodes[dst].seen
            if all(msg_id in seen for msg_id in rpc.ids):
                # nothing the receiver could ask for; account for the bytes only
                self.ledger.record_control_sent(rpc, action.src, dst)
                self.ledger.record_control_received(rpc, action.src, dst)
            else:
                self._send_control(action.src, dst, rpc)

    def _arm_timer(self, action: ArmTimer) -> None:
        delay = action.at - self.now
        if action.kind is TimerKind.STAGGER_TIMEOUT:
            self.schedule(delay, self._on_stagger_timeout, action.node, action.token)
        else:
            self.schedule(delay, self._on_forward, action.node, action.message, work=True)
