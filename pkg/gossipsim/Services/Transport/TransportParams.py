from dataclasses import dataclass

from gossipsim.exceptions import ConfigError

MIB = 1024 * 1024


@dataclass(frozen=True)
class TransportParams:
    mss: int = 1460
    initial_window: int = 10
    ssthresh: int = 65536
    max_cwnd: int = MIB
    idle_timeout: float = 1000.0
    idle_reset: bool = False
    cwnd_model: bool = True
    framing_overhead: int = 64
    processing_delay: float = 0.0

    def __post_init__(self):
        if self.mss <= 0:
            raise ConfigError('mss', 'must be > 0')
        if self.initial_window < 1:
            raise ConfigError('initial_window', 'must be >= 1')
        if self.ssthresh <= 0:
            raise ConfigError('ssthresh', 'must be > 0')
        if self.max_cwnd < self.initial_cwnd:
            raise ConfigError('max_cwnd', f'must be >= initial window ({self.initial_cwnd} bytes)')
        if self.idle_timeout < 0:
            raise ConfigError('idle_timeout', 'must be >= 0')
        if self.framing_overhead < 0:
            raise ConfigError('framing_overhead', 'must be >= 0')
        if self.processing_delay < 0:
            raise ConfigError('processing_delay', 'must be >= 0')

    @property
    def initial_cwnd(self) -> int:
        return self.mss * self.initial_window
