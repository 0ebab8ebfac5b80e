"""GossipSub forwarding logic with IDONTWANT, staggering and fragmentation.

The router never keeps time itself. Every entry point takes ``now`` from the
simulator and returns the actions the simulator must carry out.
"""
import math
from typing import List

from gossipsim.exceptions import ConfigError, SimulationInvariantError
from gossipsim.Services.Metrics.MetricsLedger import MetricsLedger
from gossipsim.Services.Protocol.MeshParams import MeshParams, ProtocolFeatures
from gossipsim.Services.Protocol.NodeState import JobState, NodeState, SendJob, StaggerPlan
from gossipsim.Services.Protocol.actions import ArmTimer, Gossip, SendControl, StartTransfer, TimerKind
from gossipsim.Services.Protocol.messages import (
    DEFAULT_FRAMING_OVERHEAD,
    DEFAULT_TOPIC,
    ControlKind,
    ControlRpc,
    Message,
    fragment_message,
    make_message_id,
)


class GossipRouter:
    def __init__(
        self,
        params: MeshParams,
        features: ProtocolFeatures,
        ledger: MetricsLedger,
        id_seed: int = 0,
        framing_overhead: int = DEFAULT_FRAMING_OVERHEAD,
        processing_delay: float = 0.0,
        topic: str = DEFAULT_TOPIC,
    ):
        self.params = params
        self.features = features
        self.ledger = ledger
        self.id_seed = id_seed
        self.framing_overhead = framing_overhead
        self.processing_delay = processing_delay
        self.topic = topic

    def is_large(self, msg: Message) -> bool:
        return msg.size >= self.params.large_msg_threshold

    def _control(self, kind: ControlKind, ids) -> ControlRpc:
        return ControlRpc(kind, tuple(ids), self.framing_overhead)

    # publication

    def publish(self, node: NodeState, size: int, now: float) -> list:
        if size <= 0:
            raise ConfigError('message_size', f'must be > 0, got {size}')
        msg = Message(
            id=make_message_id(self.id_seed, node.peer, node.published),
            topic=self.topic,
            size=size,
            publisher=node.peer,
            publish_time=now,
        )
        node.published += 1

        units = [msg]
        if self.features.fragmentation and self.params.fragment_count > 1 and self.is_large(msg):
            units = fragment_message(msg, self.params.fragment_count)
        self.ledger.record_publish(msg, len(units))

        for unit in units:
            node.seen[unit.id] = now
            node.mcache.put(unit)

        actions = []
        for unit in units:
            actions.extend(self.schedule_forwards(node, unit, list(node.mesh), now))
        return actions

    # reception

    def handle_message_received(
        self, node: NodeState, msg: Message, sender: int, now: float, via_iwant: bool = False
    ) -> list:
        if sender == node.peer or not node.is_neighbor(sender):
            raise SimulationInvariantError(f'node {node.peer} received {msg.id.hex()[:12]} from unknown peer {sender}')

        node.received_from.setdefault(msg.id, set()).add(sender)
        if msg.id in node.seen:
            self.ledger.record_duplicate(msg, node.peer, via_iwant)
            job = node.outbound_queue.get((msg.id, sender))
            if job is not None and job.state is JobState.QUEUED:
                # the sender evidently holds the message already
                job.cancel()
                self.ledger.record_canceled(msg, node.peer, sender)
            return []

        node.seen[msg.id] = now
        node.mcache.put(msg)
        node.pending_iwant.pop(msg.id, None)

        actions = []
        if self.features.idontwant and self.is_large(msg):
            skip = node.dontwant_received.get(msg.id, ())
            rpc = self._control(ControlKind.IDONTWANT, (msg.id,))
            for peer in node.mesh:
                if peer != sender and peer not in skip:
                    actions.append(SendControl(node.peer, peer, rpc))

        self._record_delivery(node, msg, now)

        if self.processing_delay > 0:
            actions.append(ArmTimer(node.peer, now + self.processing_delay, TimerKind.FORWARD, message=msg))
        else:
            actions.extend(self.schedule_forwards(node, msg, self.successors(node, msg), now))
        return actions

    def _record_delivery(self, node: NodeState, msg: Message, now: float) -> None:
        if msg.fragment is None:
            self.ledger.record_completion(msg.id, node.peer, now)
            return
        parts = node.reassembly.setdefault(msg.fragment.parent_id, set())
        parts.add(msg.fragment.index)
        if len(parts) == msg.fragment.total:
            del node.reassembly[msg.fragment.parent_id]
            self.ledger.record_completion(msg.fragment.parent_id, node.peer, now)

    def successors(self, node: NodeState, msg: Message) -> List[int]:
        senders = node.received_from.get(msg.id, ())
        dontwant = node.dontwant_received.get(msg.id, ())
        result = []
        for peer in node.mesh:
            if peer in senders:
                continue
            if peer in dontwant:
                self.ledger.record_suppressed(msg, node.peer, peer)
                continue
            result.append(peer)
        return result

    def on_forward_timer(self, node: NodeState, msg: Message, now: float) -> list:
        return self.schedule_forwards(node, msg, self.successors(node, msg), now)

    # send scheduling

    def schedule_forwards(self, node: NodeState, msg: Message, successors: List[int], now: float) -> list:
        jobs = []
        for target in successors:
            key = (msg.id, target)
            if key in node.outbound_queue:
                continue
            job = SendJob(message=msg, target=target, enqueue_time=now)
            node.outbound_queue[key] = job
            jobs.append(job)
        if not jobs:
            return []

        if not self.features.stagger or not self.is_large(msg):
            actions = []
            for job in jobs:
                job.start(now)
                actions.append(StartTransfer(node.peer, job))
            return actions

        node.rng.shuffle(jobs)
        k = self.params.stagger_group_size
        groups = [jobs[i:i + k] for i in range(0, len(jobs), k)]
        for index, group in enumerate(groups):
            for job in group:
                job.group_index = index
        node.rotation.append(StaggerPlan(message=msg, groups=groups))
        if node.active_group is None:
            return self._release_next_group(node, now)
        return []

    def _release_next_group(self, node: NodeState, now: float) -> list:
        # round-robin over the messages waiting in the rotation
        while node.rotation:
            plan = node.rotation.popleft()
            group = plan.groups[plan.next_group]
            plan.next_group += 1
            if not plan.exhausted:
                node.rotation.append(plan)

            live = [job for job in group if job.state is JobState.QUEUED]
            if not live:
                continue
            actions = []
            for job in live:
                job.start(now)
                actions.append(StartTransfer(node.peer, job))
            node.active_group = live
            node.group_token += 1
            actions.append(ArmTimer(node.peer, now + self.params.stagger_interval,
                                    TimerKind.STAGGER_TIMEOUT, token=node.group_token))
            return actions

        node.active_group = None
        return []

    def on_transfer_complete(self, node: NodeState, job: SendJob, now: float) -> list:
        job.finish()
        group = node.active_group
        if group is None or not any(job is member for member in group):
            return []
        if all(member.state is JobState.DONE for member in group):
            return self._release_next_group(node, now)
        return []

    def on_stagger_timeout(self, node: NodeState, token: int, now: float) -> list:
        if token != node.group_token or node.active_group is None:
            return []
        return self._release_next_group(node, now)

    # control plane

    def handle_idontwant(self, node: NodeState, msg_id: bytes, sender: int, now: float) -> List[SendJob]:
        node.dontwant_received.setdefault(msg_id, set()).add(sender)
        job = node.outbound_queue.get((msg_id, sender))
        if job is None or job.state is not JobState.QUEUED:
            return []
        job.cancel()
        self.ledger.record_canceled(job.message, node.peer, sender)
        return [job]

    def gossip_target_count(self, node: NodeState) -> int:
        return max(self.params.d_lazy, math.ceil(self.params.gossip_factor * len(node.known)))

    def heartbeat(self, node: NodeState, now: float) -> list:
        ids = node.mcache.window()
        actions = []
        if ids:
            targets = node.known.sample(node.rng, self.gossip_target_count(node))
            if targets:
                actions.append(Gossip(node.peer, tuple(targets), self._control(ControlKind.IHAVE, ids)))
        node.mcache.shift()
        return actions

    def handle_ihave(self, node: NodeState, ids, sender: int, now: float) -> list:
        window = self.params.iwant_window
        wanted = []
        for msg_id in ids:
            if msg_id in node.seen:
                continue
            asked = node.pending_iwant.get(msg_id)
            if asked is not None and now - asked < window:
                continue
            node.pending_iwant[msg_id] = now
            wanted.append(msg_id)
        if not wanted:
            return []
        self.ledger.record_iwant(len(wanted))
        return [SendControl(node.peer, sender, self._control(ControlKind.IWANT, wanted))]

    def handle_iwant(self, node: NodeState, ids, sender: int, now: float) -> list:
        actions = []
        for msg_id in ids:
            msg = node.mcache.get(msg_id)
            if msg is None:
                continue
            job = node.outbound_queue.get((msg_id, sender))
            if job is None:
                job = SendJob(message=msg, target=sender, enqueue_time=now, via_iwant=True)
                node.outbound_queue[(msg_id, sender)] = job
            elif job.state is JobState.QUEUED:
                # a request jumps the stagger queue
                job.via_iwant = True
            else:
                continue
            job.start(now)
            actions.append(StartTransfer(node.peer, job))
        return actions
