import logging
import os
from typing import Any, Dict, List, Optional

import pandas as pd
from joblib import Parallel, delayed

from gossipsim.exceptions import ConfigError
from gossipsim.Services.presets import Cell, preset_cells
from gossipsim.Services.scenario_service import ScenarioService, apply_overrides, validate_config

logger = logging.getLogger(__name__)

COMBINED_FILE = 'combined.csv'
SUMMARY_COLUMNS = [
    'complete', 'messages', 'measured_messages', 'mean_l15_ms', 'mean_l85_ms', 'mean_l100_ms',
    'mean_l100_intervals', 'delta_l_ms', 'median_l100_ms', 'first_message_l100_ms', 'bytes_total',
    'iwant_requests', 'duplicates', 'canceled', 'suppressed',
]


def run_cell(name: str, data: Dict[str, Any], out_dir: str) -> Dict[str, Any]:
    """Run one sweep cell in isolation; failures become a row instead of an exception."""
    row: Dict[str, Any] = {'cell': name}
    try:
        config = validate_config({'name': name, **data})
        row.update(config.echo())
        logger.info('Sweep cell %s started', name)
        result = ScenarioService().run(config, os.path.join(out_dir, name))
        row.update({key: result.summary.get(key) for key in SUMMARY_COLUMNS})
        for category, count in result.summary['bytes_by_category'].items():
            row[f'bytes_{category}'] = count
        row['status'] = 'ok' if result.complete else 'incomplete'
        row['error'] = None
        logger.info('Sweep cell %s finished: %s', name, row['status'])
    except Exception as e:
        logger.exception('Sweep cell %s failed', name)
        row['status'] = 'failed'
        row['error'] = str(e)
    return row


class SweepService:
    def __init__(self, jobs: int = 1):
        self.jobs = jobs

    def cells(
        self,
        preset: Optional[str] = None,
        configs: Optional[List[Dict[str, Any]]] = None,
        overrides: Optional[List[str]] = None,
        table4_publishers: bool = False,
    ) -> List[Cell]:
        if preset is not None:
            cells = preset_cells(preset, table4_publishers)
        else:
            if not configs:
                raise ConfigError('configs', 'sweep needs a preset or at least one config')
            cells = [(data.get('name') or f'cell{i}', {k: v for k, v in data.items() if k != 'name'})
                     for i, data in enumerate(configs)]
        return [(name, apply_overrides(data, overrides or [])) for name, data in cells]

    def run(self, cells: List[Cell], out_dir: str) -> pd.DataFrame:
        if not cells:
            raise ConfigError('configs', 'empty sweep')
        os.makedirs(out_dir, exist_ok=True)
        rows = Parallel(n_jobs=self.jobs)(delayed(run_cell)(name, data, out_dir) for name, data in cells)
        combined = pd.DataFrame(rows)
        combined.to_csv(os.path.join(out_dir, COMBINED_FILE), index=False)
        failed = int((combined['status'] == 'failed').sum())
        logger.info('Sweep finished: %d cells, %d failed', len(rows), failed)
        return combined
