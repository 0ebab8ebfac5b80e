from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Tuple

from gossipsim.exceptions import SimulationInvariantError
from gossipsim.Services.Protocol.messages import ControlKind, ControlRpc, Message


class ByteCategory(str, Enum):
    PAYLOAD = 'payload'
    IHAVE = 'ihave'
    IWANT = 'iwant'
    IDONTWANT = 'idontwant'
    FRAMING = 'framing'


_CONTROL_CATEGORY = {
    ControlKind.IHAVE: ByteCategory.IHAVE,
    ControlKind.IWANT: ByteCategory.IWANT,
    ControlKind.IDONTWANT: ByteCategory.IDONTWANT,
}


class Transmission(NamedTuple):
    src: int
    dst: int
    unit_id: bytes
    start: float
    via_iwant: bool


@dataclass
class MessageRecord:
    msg_id: bytes
    publisher: int
    publish_time: float
    size: int
    fragment_count: int
    order: int
    warmup: bool
    completions: Dict[int, float] = field(default_factory=dict)
    duplicates: int = 0
    canceled: int = 0
    suppressed: int = 0


class MetricsLedger:
    """Delivery timelines and byte counters for one run.

    Per-link counters and the transmission log are only kept when ``trace`` is
    set; at tens of thousands of nodes they dominate memory.

    Bytes count as sent when they leave the sender (a finished transfer or a
    control message handed to the link) and as received one propagation delay
    later. Sent and received totals therefore only match for runs that end
    quiescent; a run cut off at the horizon can leave bytes in flight.
    """

    def __init__(self, n_nodes: int, warmup_count: int = 0, framing_overhead: int = 64, trace: bool = False):
        self.n_nodes = n_nodes
        self.warmup_count = warmup_count
        self.framing_overhead = framing_overhead
        self.trace = trace
        self.messages: Dict[bytes, MessageRecord] = {}
        self.bytes_sent: Counter = Counter()
        self.bytes_received: Counter = Counter()
        self.duplicates_by_node: Counter = Counter()
        # duplicates pushed by mesh peers, leaving out copies served for an IWANT
        self.mesh_duplicates_by_node: Counter = Counter()
        self.iwant_requests = 0
        self.completed = 0
        self.complete = False
        self.link_sent: Counter = Counter()
        self.link_received: Counter = Counter()
        self.transmissions: List[Transmission] = []
        self.suppressed_edges: List[Tuple[int, int, bytes]] = []
        self.canceled_edges: List[Tuple[int, int, bytes]] = []

    def record_publish(self, msg: Message, fragment_count: int) -> MessageRecord:
        order = len(self.messages)
        record = MessageRecord(
            msg_id=msg.id,
            publisher=msg.publisher,
            publish_time=msg.publish_time,
            size=msg.size,
            fragment_count=fragment_count,
            order=order,
            warmup=order < self.warmup_count,
        )
        self.messages[msg.id] = record
        self.record_completion(msg.id, msg.publisher, msg.publish_time)
        return record

    def record_completion(self, parent_id: bytes, node: int, now: float) -> None:
        record = self.messages[parent_id]
        if node in record.completions:
            raise SimulationInvariantError(f'node {node} completed message {parent_id.hex()[:12]} twice')
        record.completions[node] = now
        self.completed += 1

    def record_duplicate(self, unit: Message, node: int, via_iwant: bool = False) -> None:
        record = self.messages[unit.parent_id]
        record.duplicates += 1
        self.duplicates_by_node[(unit.parent_id, node)] += 1
        if not via_iwant:
            self.mesh_duplicates_by_node[(unit.parent_id, node)] += 1

    def record_canceled(self, unit: Message, node: int, target: int) -> None:
        self.messages[unit.parent_id].canceled += 1
        if self.trace:
            self.canceled_edges.append((node, target, unit.id))

    def record_suppressed(self, unit: Message, node: int, target: int) -> None:
        self.messages[unit.parent_id].suppressed += 1
        if self.trace:
            self.suppressed_edges.append((node, target, unit.id))

    def record_transfer_start(self, unit: Message, src: int, dst: int, now: float, via_iwant: bool) -> None:
        if self.trace:
            self.transmissions.append(Transmission(src, dst, unit.id, now, via_iwant))

    def record_payload_sent(self, unit: Message, src: int, dst: int) -> None:
        self.bytes_sent[ByteCategory.PAYLOAD] += unit.size
        self.bytes_sent[ByteCategory.FRAMING] += self.framing_overhead
        if self.trace:
            self.link_sent[(src, dst)] += unit.size + self.framing_overhead

    def record_payload_received(self, unit: Message, src: int, dst: int) -> None:
        self.bytes_received[ByteCategory.PAYLOAD] += unit.size
        self.bytes_received[ByteCategory.FRAMING] += self.framing_overhead
        if self.trace:
            self.link_received[(src, dst)] += unit.size + self.framing_overhead

    def record_control_sent(self, rpc: ControlRpc, src: int, dst: int) -> None:
        self.bytes_sent[_CONTROL_CATEGORY[rpc.kind]] += rpc.id_bytes
        self.bytes_sent[ByteCategory.FRAMING] += rpc.framing_overhead
        if self.trace:
            self.link_sent[(src, dst)] += rpc.wire_size

    def record_control_received(self, rpc: ControlRpc, src: int, dst: int) -> None:
        self.bytes_received[_CONTROL_CATEGORY[rpc.kind]] += rpc.id_bytes
        self.bytes_received[ByteCategory.FRAMING] += rpc.framing_overhead
        if self.trace:
            self.link_received[(src, dst)] += rpc.wire_size

    def record_iwant(self, count: int) -> None:
        self.iwant_requests += count

    @property
    def expected_completions(self) -> int:
        return len(self.messages) * self.n_nodes

    def all_complete(self) -> bool:
        return self.completed == self.expected_completions

    @property
    def total_bytes(self) -> int:
        return sum(self.bytes_sent[c] for c in ByteCategory)

    def bytes_by_category(self) -> Dict[str, int]:
        return {c.value: int(self.bytes_sent[c]) for c in ByteCategory}

    def records(self) -> List[MessageRecord]:
        return sorted(self.messages.values(), key=lambda r: r.order)
