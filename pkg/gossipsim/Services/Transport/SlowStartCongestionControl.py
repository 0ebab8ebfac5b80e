import math

from gossipsim.Services.Transport.CongestionControlInterface import CongestionControlInterface
from gossipsim.Services.Transport.LinkState import LinkState
from gossipsim.Services.Transport.TransportParams import TransportParams


class SlowStartCongestionControl(CongestionControlInterface):
    """Loss-free window: doubles per RTT below ssthresh, then grows by one MSS per RTT."""

    def __init__(self, params: TransportParams):
        self.params = params

    def initial_cwnd(self) -> float:
        return float(self.params.initial_cwnd)

    def initial_ssthresh(self) -> float:
        return float(self.params.ssthresh)

    def cwnd_update(self, link: LinkState, now: float) -> None:
        if link.cwnd < link.ssthresh:
            link.cwnd = min(link.cwnd * 2, self.params.max_cwnd)
        else:
            link.cwnd = min(link.cwnd + self.params.mss, self.params.max_cwnd)

    def idle_check(self, link: LinkState, now: float) -> bool:
        if not self.params.idle_reset:
            return False
        if now - link.last_activity > self.params.idle_timeout and link.cwnd > self.initial_cwnd():
            link.cwnd = self.initial_cwnd()
            return True
        return False

    def rate_limit(self, link: LinkState) -> float:
        if link.rtt <= 0:
            return math.inf
        return link.cwnd / link.rtt

    def grows(self, link: LinkState) -> bool:
        return link.rtt > 0 and link.cwnd < self.params.max_cwnd
