"""Flow-level bandwidth sharing.

Each transfer is capped by its link's congestion window (shared by the
transfers on that link) and by the receiver's downlink split over its
incoming transfers. The sender's uplink is then water-filled across its
transfers, so capacity left over by window-bound transfers goes to the rest.
Rates are recomputed for every sender touched whenever a transfer starts,
completes or a window grows. A rate change interrupts the transfer's
completion process and starts a new one for the bytes still to go.
"""
from typing import Callable, Dict, Iterable, List, Optional

import simpy

from gossipsim.Services.Protocol.NodeState import SendJob
from gossipsim.Services.Transport.CongestionControlInterface import CongestionControlInterface
from gossipsim.Services.Transport.LinkState import LinkState


class Transfer:
    __slots__ = ('link', 'job', 'total', 'sent', 'rate', 'start', 'last_update', 'proc')

    def __init__(self, link: LinkState, job: SendJob, total: int, now: float):
        self.link = link
        self.job = job
        self.total = total
        self.sent = 0.0
        self.rate = 0.0
        self.start = now
        self.last_update = now
        self.proc: Optional[simpy.Process] = None

    def settle(self, now: float) -> None:
        self.sent = min(self.total, self.sent + self.rate * (now - self.last_update))
        self.last_update = now

    @property
    def remaining(self) -> float:
        return self.total - self.sent


def water_fill(capacity: float, caps: List[float]) -> List[float]:
    """Max-min fair split of capacity among flows with individual caps."""
    rates = [0.0] * len(caps)
    remaining = capacity
    left = len(caps)
    for i in sorted(range(len(caps)), key=lambda j: caps[j]):
        share = remaining / left
        rates[i] = min(caps[i], share)
        remaining -= rates[i]
        left -= 1
    return rates


def _call(handler, *args):
    handler(*args)


class FlowScheduler:
    def __init__(
        self,
        env: simpy.Environment,
        congestion: CongestionControlInterface,
        uplink: float,
        downlink: float,
        latency: Callable[[int, int], float],
        on_complete: Optional[Callable[[Transfer], None]] = None,
        fire: Callable = _call,
    ):
        self.env = env
        self.congestion = congestion
        self.uplink = uplink
        self.downlink = downlink
        self.latency = latency
        self.on_complete = on_complete or (lambda transfer: None)
        # lets the simulator wrap every handler this scheduler runs
        self.fire = fire
        self.links: Dict[tuple, LinkState] = {}
        self.outgoing: Dict[int, List[Transfer]] = {}
        self.incoming: Dict[int, List[Transfer]] = {}
        self.active_count = 0

    def link(self, src: int, dst: int) -> LinkState:
        link = self.links.get((src, dst))
        if link is None:
            link = LinkState(
                src=src,
                dst=dst,
                tau_p=self.latency(src, dst),
                cwnd=self.congestion.initial_cwnd(),
                ssthresh=self.congestion.initial_ssthresh(),
            )
            self.links[(src, dst)] = link
        return link

    def effective_rate(self, transfer: Transfer) -> float:
        """Upper bound for one transfer before the sender's uplink is shared out."""
        link = transfer.link
        window = self.congestion.rate_limit(link) / len(link.active)
        downlink = self.downlink / len(self.incoming[link.dst])
        return min(window, downlink)

    def allocate(self, node: int, now: float) -> None:
        transfers = self.outgoing.get(node)
        if not transfers:
            return
        rates = water_fill(self.uplink, [self.effective_rate(t) for t in transfers])
        for transfer, rate in zip(transfers, rates):
            self._set_rate(transfer, rate, now)

    # processes

    def _stop(self, proc: Optional[simpy.Process]) -> None:
        if proc is not None and proc.is_alive and proc is not self.env.active_process:
            proc.interrupt()

    def _completion(self, transfer: Transfer, delay: float):
        try:
            yield self.env.timeout(delay)
        except simpy.Interrupt:
            return
        self.fire(self.on_complete, transfer)

    def _progress(self, link: LinkState):
        try:
            yield self.env.timeout(link.rtt)
        except simpy.Interrupt:
            return
        self.fire(self.on_tick, link)

    def _set_rate(self, transfer: Transfer, rate: float, now: float) -> None:
        if rate == transfer.rate:
            return
        transfer.settle(now)
        transfer.rate = rate
        self._stop(transfer.proc)
        transfer.proc = self.env.process(self._completion(transfer, transfer.remaining / rate))

    def _affected(self, src: int, dst: int) -> List[int]:
        senders = {src}
        senders.update(t.link.src for t in self.incoming.get(dst, ()))
        return sorted(senders)

    def _reallocate(self, senders: Iterable[int], now: float) -> None:
        for sender in senders:
            self.allocate(sender, now)

    def start(self, job: SendJob, src: int, now: float) -> Transfer:
        link = self.link(src, job.target)
        was_idle = link.idle
        if was_idle:
            self.congestion.idle_check(link, now)
        transfer = Transfer(link, job, job.message.size, now)
        link.active.append(transfer)
        link.last_activity = now
        self.outgoing.setdefault(src, []).append(transfer)
        self.incoming.setdefault(job.target, []).append(transfer)
        self.active_count += 1
        self._reallocate(self._affected(src, job.target), now)
        if was_idle and self.congestion.grows(link):
            link.ticker = self.env.process(self._progress(link))
        return transfer

    def finish(self, transfer: Transfer, now: float) -> None:
        transfer.sent = transfer.total
        transfer.last_update = now
        link = transfer.link
        link.active.remove(transfer)
        link.last_activity = now
        if link.idle:
            self._stop(link.ticker)
            link.ticker = None
        self.outgoing[link.src].remove(transfer)
        self.incoming[link.dst].remove(transfer)
        self.active_count -= 1
        self._reallocate(self._affected(link.src, link.dst), now)

    def on_tick(self, link: LinkState) -> None:
        if link.idle:
            return
        now = self.env.now
        self.congestion.cwnd_update(link, now)
        self.allocate(link.src, now)
        if self.congestion.grows(link):
            link.ticker = self.env.process(self._progress(link))
        else:
            link.ticker = None
