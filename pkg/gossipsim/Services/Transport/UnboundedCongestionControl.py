import math

from gossipsim.Services.Transport.CongestionControlInterface import CongestionControlInterface
from gossipsim.Services.Transport.LinkState import LinkState
from gossipsim.Services.Transport.TransportParams import TransportParams


class UnboundedCongestionControl(CongestionControlInterface):
    """No window at all; links are limited by bandwidth sharing only."""

    def __init__(self, params: TransportParams):
        self.params = params

    def initial_cwnd(self) -> float:
        return float(self.params.initial_cwnd)

    def initial_ssthresh(self) -> float:
        return float(self.params.ssthresh)

    def cwnd_update(self, link: LinkState, now: float) -> None:
        pass

    def idle_check(self, link: LinkState, now: float) -> bool:
        return False

    def rate_limit(self, link: LinkState) -> float:
        return math.inf

    def grows(self, link: LinkState) -> bool:
        return False
