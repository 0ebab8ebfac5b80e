"""Named scenario families. Each preset expands to (cell name, config dict) pairs."""
from typing import Any, Dict, List, Tuple

from gossipsim.exceptions import ConfigError

KIB = 1024

Cell = Tuple[str, Dict[str, Any]]

SCENARIO1_NODES = list(range(2000, 12001, 2000))
SCENARIO2_SIZES_KB = list(range(200, 1001, 200))
SCENARIO3_PUBLISHERS = list(range(22, 103, 20))
SCENARIO3_PUBLISHERS_ALT = list(range(20, 101, 20))
LATENCY_SWEEP_MS = [25, 50, 100]
LATENCY_SWEEP_WARMUPS = 15
LATENCY_SWEEP_MEASURED = 5


def scenario1() -> List[Cell]:
    return [
        (f'n{n}', {'n_nodes': n, 'n_publishers': 12, 'message_size': 200 * KIB, 'inter_message_delay': 3000.0})
        for n in SCENARIO1_NODES
    ]


def scenario2() -> List[Cell]:
    return [
        (f'{kb}kb', {'n_nodes': 1000, 'n_publishers': 12, 'message_size': kb * KIB, 'inter_message_delay': 4000.0})
        for kb in SCENARIO2_SIZES_KB
    ]


def scenario3(table4_publishers: bool = False) -> List[Cell]:
    counts = SCENARIO3_PUBLISHERS_ALT if table4_publishers else SCENARIO3_PUBLISHERS
    return [
        (f'p{p}', {'n_nodes': 1000, 'n_publishers': p, 'message_size': 50 * KIB, 'inter_message_delay': 100.0})
        for p in counts
    ]


def latency_sweep(stagger: bool = False) -> List[Cell]:
    features = {'idontwant': True, 'stagger': stagger, 'stagger_group_size': 1}
    cells = []
    for kb in SCENARIO2_SIZES_KB:
        for latency in LATENCY_SWEEP_MS:
            cells.append((f'{kb}kb-{latency}ms', {
                'n_nodes': 1000,
                'n_publishers': 1,
                'messages_per_publisher': LATENCY_SWEEP_WARMUPS + LATENCY_SWEEP_MEASURED,
                'warmup_count': LATENCY_SWEEP_WARMUPS,
                'message_size': kb * KIB,
                'inter_message_delay': 4000.0,
                'link_latency': float(latency),
                **features,
            }))
    return cells


def feature_matrix() -> List[Cell]:
    base = {'n_nodes': 1000, 'n_publishers': 12, 'message_size': 1024 * KIB, 'inter_message_delay': 4000.0}
    variants = [
        ('baseline', {}),
        ('idontwant', {'idontwant': True}),
    ]
    for k in (1, 2, 3, 4):
        variants.append((f'stagger-k{k}', {'idontwant': True, 'stagger': True, 'stagger_group_size': k}))
    variants.append(('fragments-n4', {'fragmentation': True, 'fragment_count': 4}))
    variants.append(('all', {
        'idontwant': True, 'stagger': True, 'stagger_group_size': 3, 'fragmentation': True, 'fragment_count': 4,
    }))
    return [(name, {**base, **extra}) for name, extra in variants]


PRESETS = {
    'table1-scenario1': scenario1,
    'table1-scenario2': scenario2,
    'table1-scenario3': scenario3,
    'table3-latency-sweep': lambda: latency_sweep(stagger=False),
    'table3-latency-sweep-stagger': lambda: latency_sweep(stagger=True),
    'feature-matrix': feature_matrix,
}


def preset_cells(name: str, table4_publishers: bool = False) -> List[Cell]:
    if name not in PRESETS:
        raise ConfigError('preset', f'unknown preset {name!r}; choose one of {", ".join(sorted(PRESETS))}')
    if name == 'table1-scenario3':
        return scenario3(table4_publishers)
    return PRESETS[name]()
