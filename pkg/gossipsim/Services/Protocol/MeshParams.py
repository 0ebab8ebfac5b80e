from dataclasses import dataclass
from typing import Optional

from gossipsim.exceptions import ConfigError


@dataclass(frozen=True)
class MeshParams:
    """Overlay and forwarding knobs. Defaults are the usual GossipSub values."""

    d: int = 8
    d_low: int = 6
    d_high: int = 12
    d_lazy: int = 6
    d_out: int = 3
    gossip_factor: float = 0.05
    heartbeat_interval: float = 1000.0
    stagger_interval: float = 200.0
    stagger_group_size: int = 1
    large_msg_threshold: int = 16 * 1024
    fragment_count: int = 1
    flood_publish: bool = False
    history_length: int = 5
    gossip_window: int = 3
    iwant_dedup_window: Optional[float] = None

    def __post_init__(self):
        if not self.d_low <= self.d <= self.d_high:
            raise ConfigError('d', f'expected d_low <= d <= d_high, got {self.d_low} <= {self.d} <= {self.d_high}')
        if self.d_low < 1:
            raise ConfigError('d_low', 'must be >= 1')
        if not 0 <= self.d_out <= self.d_low:
            raise ConfigError('d_out', 'must lie in [0, d_low]')
        if self.d_lazy < 0:
            raise ConfigError('d_lazy', 'must be >= 0')
        if not 0.0 <= self.gossip_factor <= 1.0:
            raise ConfigError('gossip_factor', 'must lie in [0, 1]')
        if self.heartbeat_interval <= 0:
            raise ConfigError('heartbeat_interval', 'must be > 0')
        if self.stagger_interval <= 0:
            raise ConfigError('stagger_interval', 'must be > 0')
        if self.stagger_group_size < 1:
            raise ConfigError('stagger_group_size', 'must be >= 1')
        if self.fragment_count < 1:
            raise ConfigError('fragment_count', 'must be >= 1')
        if self.large_msg_threshold < 0:
            raise ConfigError('large_msg_threshold', 'must be >= 0')
        if self.flood_publish:
            # only the mesh publish path exists
            raise ConfigError('flood_publish', 'flood publishing is not supported')
        if self.history_length < 1:
            raise ConfigError('history_length', 'must be >= 1')
        if not 1 <= self.gossip_window <= self.history_length:
            raise ConfigError('gossip_window', 'must lie in [1, history_length]')
        if self.iwant_dedup_window is not None and self.iwant_dedup_window < 0:
            raise ConfigError('iwant_dedup_window', 'must be >= 0')

    @property
    def iwant_window(self) -> float:
        if self.iwant_dedup_window is None:
            return self.heartbeat_interval
        return self.iwant_dedup_window


@dataclass(frozen=True)
class ProtocolFeatures:
    idontwant: bool = False
    stagger: bool = False
    fragmentation: bool = False
