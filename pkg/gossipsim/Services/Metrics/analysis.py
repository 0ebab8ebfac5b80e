"""Evaluation quantities computed from a finished ledger, plus the closed-form estimates."""
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import pandas as pd

from gossipsim.exceptions import ConfigError
from gossipsim.Services.Metrics.MetricsLedger import MetricsLedger, MessageRecord
from gossipsim.Services.Topology.network import diameter_estimate

COVERAGE_LEVELS = (15, 85, 100)
INTERVAL_MS = 100
MIN_MESSAGES_FOR_DEVIATION = 3

MESSAGE_COLUMNS = [
    'msg_id', 'publisher', 'publish_ms', 'l15_ms', 'l85_ms', 'l100_ms', 'duplicates', 'warmup',
    'size', 'fragments', 'l15_intervals', 'l85_intervals', 'l100_intervals', 'node_median_ms',
    'canceled', 'suppressed', 'complete',
]


def coverage_latency(record: MessageRecord, n_nodes: int, percent: int) -> Optional[float]:
    """Time from publication until ceil(percent% of N) nodes hold the whole message."""
    if not 0 < percent <= 100:
        raise ValueError(f'coverage level must lie in (0, 100], got {percent}')
    need = -(-percent * n_nodes // 100)
    if len(record.completions) < need:
        return None
    times = sorted(record.completions.values())
    return times[need - 1] - record.publish_time


def interval_count(latency_ms: Optional[float], interval_ms: float = INTERVAL_MS) -> Optional[int]:
    if latency_ms is None:
        return None
    return math.ceil(latency_ms / interval_ms)


def node_median(record: MessageRecord) -> float:
    return float(np.median([t - record.publish_time for t in record.completions.values()]))


def raised_mesh_duplicates(baseline: MetricsLedger, ledger: MetricsLedger) -> List[tuple]:
    """(message order, node) pairs where mesh peers pushed more duplicates than in the baseline run.

    Both ledgers must come from the same seeded scenario. Copies served for
    an IWANT are left out: a node may ask for a message it is still receiving.
    """
    base = {(baseline.messages[mid].order, node): n for (mid, node), n in baseline.mesh_duplicates_by_node.items()}
    raised = []
    for (mid, node), n in ledger.mesh_duplicates_by_node.items():
        key = (ledger.messages[mid].order, node)
        if n > base.get(key, 0):
            raised.append(key)
    return sorted(raised)


def message_frame(ledger: MetricsLedger) -> pd.DataFrame:
    rows = []
    for record in ledger.records():
        latencies = {p: coverage_latency(record, ledger.n_nodes, p) for p in COVERAGE_LEVELS}
        rows.append({
            'msg_id': record.msg_id.hex(),
            'publisher': record.publisher,
            'publish_ms': record.publish_time,
            'l15_ms': latencies[15],
            'l85_ms': latencies[85],
            'l100_ms': latencies[100],
            'duplicates': record.duplicates,
            'warmup': record.warmup,
            'size': record.size,
            'fragments': record.fragment_count,
            'l15_intervals': interval_count(latencies[15]),
            'l85_intervals': interval_count(latencies[85]),
            'l100_intervals': interval_count(latencies[100]),
            'node_median_ms': node_median(record),
            'canceled': record.canceled,
            'suppressed': record.suppressed,
            'complete': len(record.completions) == ledger.n_nodes,
        })
    frame = pd.DataFrame(rows, columns=MESSAGE_COLUMNS)
    for column in ('l15_intervals', 'l85_intervals', 'l100_intervals'):
        frame[column] = frame[column].astype('Int64')
    return frame


def _mean(values: List[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def summarize(ledger: MetricsLedger) -> dict:
    """Run summary. Latency statistics skip warm-up messages, byte totals do not."""
    records = ledger.records()
    measured = [r for r in records if not r.warmup]
    levels = {
        p: [v for v in (coverage_latency(r, ledger.n_nodes, p) for r in measured) if v is not None]
        for p in COVERAGE_LEVELS
    }
    l100 = levels[100]

    delta = None
    if len(measured) >= MIN_MESSAGES_FOR_DEVIATION and len(l100) >= MIN_MESSAGES_FOR_DEVIATION:
        delta = float(np.std(l100, ddof=1))

    first = coverage_latency(records[0], ledger.n_nodes, 100) if records else None
    return {
        'messages': len(records),
        'measured_messages': len(measured),
        'mean_l15_ms': _mean(levels[15]),
        'mean_l85_ms': _mean(levels[85]),
        'mean_l100_ms': _mean(l100),
        'mean_l100_intervals': interval_count(_mean(l100)),
        'delta_l_ms': delta,
        'median_l100_ms': float(np.median(l100)) if l100 else None,
        'first_message_l100_ms': first,
        'bytes_total': int(ledger.total_bytes),
        'bytes_by_category': ledger.bytes_by_category(),
        'iwant_requests': ledger.iwant_requests,
        'duplicates': sum(r.duplicates for r in records),
        'canceled': sum(r.canceled for r in records),
        'suppressed': sum(r.suppressed for r in records),
        'complete': bool(ledger.complete),
    }


@dataclass(frozen=True)
class StaggerRound:
    round: int
    new_peers: int
    cumulative: int
    elapsed_ms: float


@dataclass(frozen=True)
class AnalyticalEstimate:
    hops: int
    tau_tx_ms: float
    baseline_ms: float
    fragmented_ms: float
    stagger_table: List[StaggerRound] = field(default_factory=list)


def stagger_growth(
    degree: int,
    nodes: Optional[int] = None,
    rounds: Optional[int] = None,
    round_ms: float = 0.0,
) -> List[StaggerRound]:
    """Peers newly covered per round when every holder forwards to one successor per round.

    A holder keeps forwarding for ``degree`` rounds, so the count doubles until
    round ``degree`` and afterwards is the sum of the previous ``degree`` rounds.
    Stops after ``rounds`` rounds or once ``nodes`` peers are covered.
    """
    if degree < 1:
        raise ConfigError('degree', 'must be >= 1')
    if nodes is None and rounds is None:
        raise ValueError('either nodes or rounds is required')
    table = []
    history: List[int] = []
    cumulative = 0
    index = 0
    while True:
        if rounds is not None and index >= rounds:
            break
        if rounds is None and cumulative >= nodes:
            break
        new = 2 ** index if index < degree else sum(history[-degree:])
        history.append(new)
        cumulative += new
        table.append(StaggerRound(index, new, cumulative, (index + 1) * round_ms))
        index += 1
    return table


def analytical_estimate(
    size: float,
    rate_mbps: float,
    latency_ms: float,
    nodes: int,
    degree: int,
    fragments: int = 1,
) -> AnalyticalEstimate:
    """Store-and-forward estimates for a full-mesh push of ``size`` bytes.

    A relay pushes the message to all ``degree`` mesh members over one uplink,
    so one hop costs ``degree * S * 8 / R`` plus the propagation latency.
    """
    for name, value in (('size', size), ('rate', rate_mbps), ('nodes', nodes), ('fragments', fragments)):
        if value <= 0:
            raise ConfigError(name, 'must be > 0')
    if latency_ms < 0:
        raise ConfigError('latency', 'must be >= 0')

    hops = diameter_estimate(nodes, degree)
    tau_tx = degree * size * 8 / (rate_mbps * 1000)
    baseline = (latency_ms + tau_tx) * hops
    fragmented = tau_tx * (2 * hops - 1) / fragments + latency_ms * hops if hops else 0.0
    round_ms = size * 8 / (rate_mbps * 1000)
    return AnalyticalEstimate(
        hops=hops,
        tau_tx_ms=tau_tx,
        baseline_ms=baseline,
        fragmented_ms=fragmented,
        stagger_table=stagger_growth(degree, nodes=nodes, round_ms=round_ms),
    )
