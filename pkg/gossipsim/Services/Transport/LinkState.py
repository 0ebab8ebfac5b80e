from dataclasses import dataclass, field
from typing import Any, List, Optional


@dataclass(eq=False)
class LinkState:
    """Transport state of one directed link. Each direction keeps its own window."""

    src: int
    dst: int
    tau_p: float
    cwnd: float
    ssthresh: float
    last_activity: float = 0.0
    active: List = field(default_factory=list)
    # simpy process growing the window once per RTT while the link is busy
    ticker: Optional[Any] = None

    @property
    def rtt(self) -> float:
        return 2 * self.tau_p

    @property
    def idle(self) -> bool:
        return not self.active
