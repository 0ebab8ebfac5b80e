import os

from flask import Flask

from gossipsim.config import Config, configure_logging
from gossipsim.extensions import db


# Register Blueprints (lazy import)
def register_blueprints(app):
    from gossipsim.controllers.simulation_controller import simulation_bp
    app.register_blueprint(simulation_bp)


def create_app(config_object=Config):
    app = Flask(__name__)
    app.config.from_object(config_object)
    configure_logging(app.config.get('LOG_LEVEL', 'INFO'))

    db.init_app(app)

    # Ensure models are imported
    import gossipsim.models.run  # noqa

    register_blueprints(app)
    with app.app_context():
        db.create_all()
    return app


if __name__ == '__main__':
    app = create_app()
    app.run(host='0.0.0.0', port=int(os.getenv('PORT', 5000)), debug=True)
