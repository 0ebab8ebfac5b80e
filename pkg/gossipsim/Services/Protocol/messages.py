"""Message descriptors and control RPCs.

Messages carry sizes only, never content. Identifiers are 32-byte digests
derived from the scenario seed so two runs of the same scenario name every
message identically.
"""
import hashlib
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from gossipsim.exceptions import FragmentationError, SimulationInvariantError

MESSAGE_ID_SIZE = 32
DEFAULT_FRAMING_OVERHEAD = 64
DEFAULT_TOPIC = 'gossipsim'


class ControlKind(str, Enum):
    IHAVE = 'IHAVE'
    IWANT = 'IWANT'
    IDONTWANT = 'IDONTWANT'


@dataclass(frozen=True)
class FragmentInfo:
    parent_id: bytes
    index: int
    total: int


@dataclass(frozen=True)
class Message:
    id: bytes
    topic: str
    size: int
    publisher: int
    publish_time: float
    fragment: Optional[FragmentInfo] = None

    @property
    def parent_id(self) -> bytes:
        return self.fragment.parent_id if self.fragment is not None else self.id

    @property
    def is_fragment(self) -> bool:
        return self.fragment is not None


@dataclass(frozen=True)
class ControlRpc:
    kind: ControlKind
    ids: Tuple[bytes, ...]
    framing_overhead: int = field(default=DEFAULT_FRAMING_OVERHEAD)

    def __post_init__(self):
        if not self.ids:
            raise SimulationInvariantError(f'{self.kind.value} without message ids')

    @property
    def id_bytes(self) -> int:
        return MESSAGE_ID_SIZE * len(self.ids)

    @property
    def wire_size(self) -> int:
        return self.framing_overhead + self.id_bytes


def make_message_id(seed: int, publisher: int, seqno: int) -> bytes:
    return hashlib.sha256(f'{seed}:{publisher}:{seqno}'.encode()).digest()


def fragment_id(parent_id: bytes, index: int) -> bytes:
    return hashlib.sha256(parent_id + b'/fragment/' + index.to_bytes(4, 'big')).digest()


def fragment_sizes(size: int, n: int) -> List[int]:
    chunk = -(-size // n)
    sizes = []
    remaining = size
    for _ in range(n):
        part = min(chunk, remaining)
        sizes.append(part)
        remaining -= part
    return sizes


def fragment_message(msg: Message, n: int) -> List[Message]:
    """Split a message into n fragments of ceil(S/n) bytes, the last one taking the remainder."""
    if n < 1:
        raise FragmentationError(f'fragment count must be >= 1, got {n}')
    if msg.is_fragment:
        raise FragmentationError('cannot fragment a fragment')
    if n == 1:
        return [msg]
    if n > msg.size:
        raise FragmentationError(f'cannot split {msg.size} bytes into {n} fragments')
    sizes = fragment_sizes(msg.size, n)
    if sizes[-1] == 0:
        raise FragmentationError(f'splitting {msg.size} bytes into {n} fragments leaves an empty fragment')

    return [
        Message(
            id=fragment_id(msg.id, index),
            topic=msg.topic,
            size=part,
            publisher=msg.publisher,
            publish_time=msg.publish_time,
            fragment=FragmentInfo(parent_id=msg.id, index=index, total=n),
        )
        for index, part in enumerate(sizes)
    ]
