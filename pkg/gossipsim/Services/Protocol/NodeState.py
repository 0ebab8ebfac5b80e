from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Deque, Dict, List, Optional, Set, Tuple

from gossipsim.exceptions import SimulationInvariantError
from gossipsim.Services.Protocol.messages import Message
from gossipsim.Services.rng import SeededRNG


class JobState(str, Enum):
    QUEUED = 'queued'
    IN_FLIGHT = 'in_flight'
    CANCELED = 'canceled'
    DONE = 'done'


@dataclass(eq=False)
class SendJob:
    """One pending relay of a message to one peer."""

    message: Message
    target: int
    enqueue_time: float
    group_index: int = 0
    state: JobState = JobState.QUEUED
    start_time: Optional[float] = None
    via_iwant: bool = False

    def start(self, now: float) -> None:
        if self.state is not JobState.QUEUED:
            raise SimulationInvariantError(f'cannot start a job in state {self.state.value}')
        self.state = JobState.IN_FLIGHT
        self.start_time = now

    def cancel(self) -> None:
        # in-flight transfers are never aborted
        if self.state is not JobState.QUEUED:
            raise SimulationInvariantError(f'cannot cancel a job in state {self.state.value}')
        self.state = JobState.CANCELED

    def finish(self) -> None:
        if self.state is not JobState.IN_FLIGHT:
            raise SimulationInvariantError(f'cannot finish a job in state {self.state.value}')
        self.state = JobState.DONE


@dataclass(eq=False)
class StaggerPlan:
    message: Message
    groups: List[List[SendJob]]
    next_group: int = 0

    @property
    def exhausted(self) -> bool:
        return self.next_group >= len(self.groups)


class MessageCache:
    """Sliding window of recently seen messages, shifted once per heartbeat."""

    def __init__(self, window_size: int, history_size: int):
        self.window_size = window_size
        self.history_size = history_size
        self.messages: Dict[bytes, Message] = {}
        self.history: List[List[bytes]] = [[] for _ in range(history_size)]

    def put(self, msg: Message) -> None:
        self.messages[msg.id] = msg
        self.history[0].append(msg.id)

    def get(self, msg_id: bytes) -> Optional[Message]:
        return self.messages.get(msg_id)

    def window(self) -> List[bytes]:
        ids = []
        for slot in self.history[:self.window_size]:
            ids.extend(slot)
        return ids

    def shift(self) -> None:
        for msg_id in self.history[-1]:
            self.messages.pop(msg_id, None)
        self.history = [[]] + self.history[:-1]


class KnownPeers:
    """Every node except ourselves and our mesh, without materialising the set."""

    def __init__(self, n_nodes: int, peer: int, mesh: Tuple[int, ...]):
        self.n_nodes = n_nodes
        self.excluded = frozenset(mesh) | {peer}

    def __len__(self) -> int:
        return self.n_nodes - len(self.excluded)

    def __contains__(self, other: int) -> bool:
        return 0 <= other < self.n_nodes and other not in self.excluded

    def __iter__(self):
        return (p for p in range(self.n_nodes) if p not in self.excluded)

    def sample(self, rng: SeededRNG, k: int) -> List[int]:
        if k >= len(self):
            return list(self)
        draw = rng.sample(range(self.n_nodes), min(self.n_nodes, k + len(self.excluded)))
        return [p for p in draw if p not in self.excluded][:k]


@dataclass(eq=False)
class NodeState:
    peer: int
    mesh: Tuple[int, ...]
    known: KnownPeers
    rng: SeededRNG
    mcache: MessageCache
    seen: Dict[bytes, float] = field(default_factory=dict)
    received_from: Dict[bytes, Set[int]] = field(default_factory=dict)
    dontwant_received: Dict[bytes, Set[int]] = field(default_factory=dict)
    outbound_queue: Dict[Tuple[bytes, int], SendJob] = field(default_factory=dict)
    rotation: Deque[StaggerPlan] = field(default_factory=deque)
    active_group: Optional[List[SendJob]] = None
    group_token: int = 0
    reassembly: Dict[bytes, Set[int]] = field(default_factory=dict)
    pending_iwant: Dict[bytes, float] = field(default_factory=dict)
    published: int = 0

    def is_neighbor(self, other: int) -> bool:
        return other in self.mesh or other in self.known
