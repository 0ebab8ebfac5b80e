"""Instructions the router hands back to the simulator."""
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from gossipsim.Services.Protocol.NodeState import SendJob
from gossipsim.Services.Protocol.messages import ControlRpc, Message


class TimerKind(str, Enum):
    STAGGER_TIMEOUT = 'stagger_timeout'
    FORWARD = 'forward'


@dataclass(frozen=True)
class StartTransfer:
    src: int
    job: SendJob


@dataclass(frozen=True)
class SendControl:
    src: int
    dst: int
    rpc: ControlRpc


@dataclass(frozen=True)
class Gossip:
    src: int
    targets: Tuple[int, ...]
    rpc: ControlRpc


@dataclass(frozen=True)
class ArmTimer:
    node: int
    at: float
    kind: TimerKind
    token: int = 0
    message: Optional[Message] = None
