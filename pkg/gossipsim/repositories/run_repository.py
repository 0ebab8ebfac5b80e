from gossipsim.extensions import db
from gossipsim.models.run import RunRecord


class RunRepository:
    @staticmethod
    def add(**kwargs) -> RunRecord:
        run = RunRecord(**kwargs)
        db.session.add(run)
        return run

    @staticmethod
    def all():
        return RunRecord.query.order_by(RunRecord.created_at).all()

    @staticmethod
    def get(run_id):
        return db.session.get(RunRecord, run_id)

    @staticmethod
    def commit():
        db.session.commit()
