import logging
import os
import uuid
from dataclasses import asdict

from flask import Blueprint, current_app, jsonify, request

from gossipsim.exceptions import ConfigError
from gossipsim.repositories.run_repository import RunRepository
from gossipsim.Services.Metrics.analysis import analytical_estimate
from gossipsim.Services.scenario_service import ScenarioService, validate_config

logger = logging.getLogger(__name__)

simulation_bp = Blueprint('simulation', __name__)

ESTIMATE_FIELDS = ('size', 'rate', 'latency', 'nodes', 'degree')


@simulation_bp.errorhandler(ConfigError)
def config_error(e: ConfigError):
    return jsonify({'error': e.message, 'field': e.field}), 400


@simulation_bp.route('/estimate', methods=['POST'])
def estimate():
    body = request.get_json(silent=True) or {}
    missing = [name for name in ESTIMATE_FIELDS if name not in body]
    if missing:
        raise ConfigError(missing[0], 'required')
    try:
        result = analytical_estimate(
            size=float(body['size']),
            rate_mbps=float(body['rate']),
            latency_ms=float(body['latency']),
            nodes=int(body['nodes']),
            degree=int(body['degree']),
            fragments=int(body.get('fragments', 1)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError('estimate', str(e)) from e
    return jsonify(asdict(result)), 200


@simulation_bp.route('/runs', methods=['POST'])
def create_run():
    config = validate_config(request.get_json(silent=True))
    run_id = str(uuid.uuid4())
    out_dir = os.path.join(current_app.config['OUTPUT_DIR'], run_id)
    try:
        result = ScenarioService().run(config, out_dir)
    except ConfigError:
        raise
    except Exception:
        logger.exception('Run %s failed', run_id)
        return jsonify({'error': 'simulation failed'}), 500

    run = RunRepository.add(
        id=run_id,
        name=config.name,
        seed=config.seed,
        config=config.echo(),
        summary=result.summary,
        complete=result.complete,
        output_dir=out_dir,
    )
    RunRepository.commit()
    return jsonify(run.to_dict()), 201


@simulation_bp.route('/runs', methods=['GET'])
def list_runs():
    return jsonify([run.to_dict() for run in RunRepository.all()]), 200


@simulation_bp.route('/runs/<run_id>', methods=['GET'])
def get_run(run_id):
    run = RunRepository.get(run_id)
    if run is None:
        return jsonify({'error': 'not found'}), 404
    return jsonify(run.to_dict()), 200
