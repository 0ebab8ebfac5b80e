from abc import ABC, abstractmethod

from gossipsim.Services.Transport.LinkState import LinkState


class CongestionControlInterface(ABC):
    @abstractmethod
    def initial_cwnd(self) -> float:
        pass

    @abstractmethod
    def initial_ssthresh(self) -> float:
        pass

    @abstractmethod
    def cwnd_update(self, link: LinkState, now: float) -> None:
        pass

    @abstractmethod
    def idle_check(self, link: LinkState, now: float) -> bool:
        pass

    @abstractmethod
    def rate_limit(self, link: LinkState) -> float:
        """Bytes per millisecond the window allows on the link."""
        pass

    @abstractmethod
    def grows(self, link: LinkState) -> bool:
        """Whether the window can still change, i.e. per-RTT updates are needed."""
        pass
