import uuid
from datetime import datetime

from sqlalchemy import JSON, Boolean, Column, DateTime, Integer, String

from gossipsim.extensions import db


class RunRecord(db.Model):
    __tablename__ = 'runs'

    id = Column(String(36), primary_key=True, default=lambda: str(uuid.uuid4()))
    name = Column(String, nullable=False)
    seed = Column(Integer, nullable=False)
    config = Column(JSON, nullable=False)
    summary = Column(JSON, nullable=False)
    complete = Column(Boolean, nullable=False, default=False)
    output_dir = Column(String, nullable=True)
    created_at = Column(DateTime, nullable=False, default=datetime.utcnow)

    def to_dict(self) -> dict:
        return {
            'id': self.id,
            'name': self.name,
            'seed': self.seed,
            'config': self.config,
            'summary': self.summary,
            'complete': self.complete,
            'output_dir': self.output_dir,
            'created_at': self.created_at.isoformat(),
        }
