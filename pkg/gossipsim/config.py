import logging
import os

from dotenv import load_dotenv

load_dotenv()

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class Config:
    SQLALCHEMY_DATABASE_URI = os.getenv('DATABASE_URI', 'sqlite:///gossipsim.db')
    SQLALCHEMY_TRACK_MODIFICATIONS = False
    OUTPUT_DIR = os.getenv('GOSSIPSIM_OUTPUT_DIR', 'runs')
    LOG_LEVEL = os.getenv('GOSSIPSIM_LOG_LEVEL', 'INFO')
    SWEEP_JOBS = int(os.getenv('GOSSIPSIM_SWEEP_JOBS', '1'))


def configure_logging(level: str = Config.LOG_LEVEL) -> None:
    logging.basicConfig(level=getattr(logging, str(level).upper(), logging.INFO), format=LOG_FORMAT)
