import json
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from gossipsim.exceptions import ConfigError
from gossipsim.Services.Metrics.analysis import message_frame, summarize
from gossipsim.Services.Protocol.MeshParams import MeshParams, ProtocolFeatures
from gossipsim.Services.Protocol.messages import fragment_sizes
from gossipsim.Services.Topology.network import Network, build_network
from gossipsim.Services.Transport.Simulator import Publication, Simulator
from gossipsim.Services.Transport.TransportParams import TransportParams
from gossipsim.Services.rng import SeededRNG

logger = logging.getLogger(__name__)

KIB = 1024
# slack after the last publication before a run counts as incomplete
HORIZON_SLACK_MS = 120_000.0

MESSAGES_FILE = 'messages.csv'
SUMMARY_FILE = 'summary.json'
EDGES_FILE = 'edges.txt'


class ScenarioConfig(BaseModel):
    """Flat scenario description; every field maps one-to-one onto a JSON key."""

    model_config = ConfigDict(extra='forbid')

    name: str = 'scenario'
    seed: int = 1
    n_nodes: int = Field(1000, ge=2)
    n_publishers: int = Field(12, ge=1)
    messages_per_publisher: int = Field(1, ge=1)
    message_size: int = Field(200 * KIB, gt=0)
    inter_message_delay: float = Field(4000.0, ge=0)
    warmup_count: int = Field(2, ge=0)
    horizon: Optional[float] = None

    link_latency: float = Field(100.0, ge=0)
    bandwidth_mbps: float = Field(50.0, gt=0)

    idontwant: bool = False
    stagger: bool = False
    fragmentation: bool = False

    d: int = 8
    d_low: int = 6
    d_high: int = 12
    d_lazy: int = 6
    d_out: int = 3
    gossip_factor: float = 0.05
    heartbeat_interval: float = 1000.0
    stagger_interval: float = 200.0
    stagger_group_size: int = 1
    large_msg_threshold: int = 16 * KIB
    fragment_count: int = 1
    flood_publish: bool = False
    history_length: int = 5
    gossip_window: int = 3
    iwant_dedup_window: Optional[float] = None

    mss: int = 1460
    initial_window: int = 10
    ssthresh: int = 65536
    max_cwnd: int = 1024 * KIB
    idle_timeout: float = 1000.0
    idle_reset: bool = False
    cwnd_model: bool = True
    framing_overhead: int = 64
    processing_delay: float = 0.0

    emit_edges: bool = False
    topology_retries: int = Field(20, ge=1)

    @property
    def total_messages(self) -> int:
        return self.n_publishers * self.messages_per_publisher

    @property
    def effective_horizon(self) -> float:
        if self.horizon is not None:
            return self.horizon
        return self.total_messages * self.inter_message_delay + HORIZON_SLACK_MS

    def mesh_params(self) -> MeshParams:
        return MeshParams(
            d=self.d,
            d_low=self.d_low,
            d_high=self.d_high,
            d_lazy=self.d_lazy,
            d_out=self.d_out,
            gossip_factor=self.gossip_factor,
            heartbeat_interval=self.heartbeat_interval,
            stagger_interval=self.stagger_interval,
            stagger_group_size=self.stagger_group_size,
            large_msg_threshold=self.large_msg_threshold,
            fragment_count=self.fragment_count,
            flood_publish=self.flood_publish,
            history_length=self.history_length,
            gossip_window=self.gossip_window,
            iwant_dedup_window=self.iwant_dedup_window,
        )

    def transport_params(self) -> TransportParams:
        return TransportParams(
            mss=self.mss,
            initial_window=self.initial_window,
            ssthresh=self.ssthresh,
            max_cwnd=self.max_cwnd,
            idle_timeout=self.idle_timeout,
            idle_reset=self.idle_reset,
            cwnd_model=self.cwnd_model,
            framing_overhead=self.framing_overhead,
            processing_delay=self.processing_delay,
        )

    def features(self) -> ProtocolFeatures:
        return ProtocolFeatures(idontwant=self.idontwant, stagger=self.stagger, fragmentation=self.fragmentation)

    def check(self) -> None:
        """Cross-field rules; raises ConfigError naming the offending field."""
        if self.n_publishers > self.n_nodes:
            raise ConfigError('n_publishers', f'{self.n_publishers} publishers but only {self.n_nodes} nodes')
        if self.horizon is not None and self.horizon <= self.total_messages * self.inter_message_delay:
            raise ConfigError('horizon', 'must exceed the last publication time')
        if self.fragmentation and self.fragment_count > 1 and self.message_size >= self.large_msg_threshold:
            if min(fragment_sizes(self.message_size, self.fragment_count)) == 0:
                raise ConfigError(
                    'fragment_count',
                    f'{self.message_size} bytes cannot fill {self.fragment_count} non-empty fragments',
                )
        self.mesh_params()
        self.transport_params()

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode='json')


def _field_path(error: dict) -> str:
    return '.'.join(str(part) for part in error.get('loc', ())) or 'config'


def validate_config(data: Dict[str, Any]) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError('config', 'expected a JSON object')
    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(_field_path(first), first['msg']) from e
    config.check()
    return config


def parse_override(text: str) -> tuple:
    """Split ``key=value``; the value is read as JSON and kept as a string otherwise."""
    if '=' not in text:
        raise ConfigError('override', f'expected key=value, got {text!r}')
    key, raw = text.split('=', 1)
    key = key.strip()
    if not key:
        raise ConfigError('override', f'empty key in {text!r}')
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def apply_overrides(data: Dict[str, Any], overrides: List[str]) -> Dict[str, Any]:
    merged = dict(data)
    for text in overrides or []:
        key, value = parse_override(text)
        merged[key] = value
    return merged


def load_config(path: str, overrides: Optional[List[str]] = None, seed: Optional[int] = None) -> ScenarioConfig:
    try:
        with open(path, encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError('config', f'no such file: {path}') from e
    except json.JSONDecodeError as e:
        raise ConfigError('config', f'invalid JSON: {e}') from e
    # a summary.json can be fed back in; its config block is the scenario
    if isinstance(data, dict) and 'config' in data and isinstance(data['config'], dict):
        data = data['config']
    data = apply_overrides(data, overrides or [])
    if seed is not None:
        data['seed'] = seed
    return validate_config(data)


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    summary: Dict[str, Any]
    messages: pd.DataFrame
    network: Network
    out_dir: Optional[str]

    @property
    def complete(self) -> bool:
        return bool(self.summary['complete'])


class ScenarioService:
    def __init__(self, trace: bool = False):
        self.trace = trace

    def plan(self, config: ScenarioConfig, n_nodes: int, rng: SeededRNG) -> List[Publication]:
        """Publishers drawn without replacement; message j goes out at j * delay from publisher j mod P."""
        publishers = rng.sample(range(n_nodes), config.n_publishers)
        return [
            (j * config.inter_message_delay, publishers[j % config.n_publishers], config.message_size)
            for j in range(config.total_messages)
        ]

    def simulate(self, config: ScenarioConfig):
        rng = SeededRNG(config.seed)
        mesh = config.mesh_params()
        network = build_network(
            config.n_nodes,
            mesh,
            seed=rng.derive_seed(),
            latency_ms=config.link_latency,
            bandwidth_mbps=config.bandwidth_mbps,
            max_retries=config.topology_retries,
        )
        publications = self.plan(config, network.n_nodes, rng)
        simulator = Simulator(
            network,
            mesh,
            features=config.features(),
            transport=config.transport_params(),
            seed=rng.derive_seed(),
            horizon=config.effective_horizon,
            warmup_count=config.warmup_count,
            trace=self.trace,
        )
        ledger = simulator.run(publications)
        return network, simulator, ledger

    def run(self, config: ScenarioConfig, out_dir: Optional[str] = None) -> ScenarioResult:
        logger.info('Running scenario %s (seed %d)', config.name, config.seed)
        network, simulator, ledger = self.simulate(config)
        frame = message_frame(ledger)
        summary = summarize(ledger)
        summary.update({
            'name': config.name,
            'seed': config.seed,
            'n_nodes': network.n_nodes,
            'end_ms': simulator.end_time,
            'events_processed': simulator.events_processed,
            'config': config.echo(),
        })
        result = ScenarioResult(config, summary, frame, network, out_dir)
        if out_dir is not None:
            self.write(result, out_dir)
        if not result.complete:
            logger.warning('Scenario %s did not reach every node before %.0f ms', config.name, config.effective_horizon)
        return result

    @staticmethod
    def write(result: ScenarioResult, out_dir: str) -> None:
        os.makedirs(out_dir, exist_ok=True)
        result.messages.to_csv(os.path.join(out_dir, MESSAGES_FILE), index=False)
        with open(os.path.join(out_dir, SUMMARY_FILE), 'w', encoding='utf-8') as f:
            json.dump(result.summary, f, indent=2, sort_keys=True)
            f.write('\n')
        if result.config.emit_edges:
            result.network.write_edge_list(os.path.join(out_dir, EDGES_FILE))


def run_scenario(config: ScenarioConfig, out_dir: Optional[str] = None) -> ScenarioResult:
    return ScenarioService().run(config, out_dir)
