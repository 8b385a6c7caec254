"""
SQLAlchemy repository for the cache index.
"""
from __future__ import annotations

import logging
from datetime import datetime, timezone

from sqlalchemy import func, select
from sqlalchemy.orm import Session

from app.db.orm_models import CacheEntryRecord

logger = logging.getLogger(__name__)


class SqlAlchemyCacheRepository:
    """SQLAlchemy-backed index of cached blobs."""

    def __init__(self, session: Session) -> None:
        self._session = session

    def get(self, key: str) -> CacheEntryRecord | None:
        return self._session.get(CacheEntryRecord, key)

    def record_hit(self, key: str) -> None:
        record = self.get(key)
        if record is not None:
            record.hits += 1

    def upsert(self, *, key: str, kind: str, params_json: str, blob_path: str) -> CacheEntryRecord:
        record = self.get(key)
        if record is None:
            record = CacheEntryRecord(
                key=key,
                kind=kind,
                params_json=params_json,
                blob_path=blob_path,
                hits=0,
                created_at=datetime.now(timezone.utc),
            )
            self._session.add(record)
            logger.debug("Indexed new %s entry %s", kind, key[:12])
        else:
            record.kind = kind
            record.params_json = params_json
            record.blob_path = blob_path
            logger.debug("Replaced %s entry %s", kind, key[:12])
        return record

    def count(self, kind: str | None = None) -> int:
        stmt = select(func.count(CacheEntryRecord.key))
        if kind is not None:
            stmt = stmt.where(CacheEntryRecord.kind == kind)
        return self._session.execute(stmt).scalar_one()

    def entries(self, kind: str | None = None) -> list[CacheEntryRecord]:
        stmt = select(CacheEntryRecord).order_by(CacheEntryRecord.created_at, CacheEntryRecord.key)
        if kind is not None:
            stmt = stmt.where(CacheEntryRecord.kind == kind)
        return list(self._session.execute(stmt).scalars())


__all__ = ["SqlAlchemyCacheRepository"]
