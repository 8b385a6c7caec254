"""
SQLAlchemy ORM models for the cache index.
"""
from __future__ import annotations

from datetime import datetime, timezone

from sqlalchemy import DateTime, Index, Integer, String, Text
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column


class Base(DeclarativeBase):
    """Base class for all ORM models."""


class CacheEntryRecord(Base):
    """One cached numpy archive, addressed by the sha256 of its canonical key."""

    __tablename__ = "cache_entries"

    key: Mapped[str] = mapped_column(String(64), primary_key=True)
    kind: Mapped[str] = mapped_column(String, nullable=False)
    params_json: Mapped[str] = mapped_column(Text, nullable=False)
    blob_path: Mapped[str] = mapped_column(String, nullable=False)
    hits: Mapped[int] = mapped_column(Integer, nullable=False, default=0)
    created_at: Mapped[datetime] = mapped_column(
        DateTime(timezone=True),
        default=lambda: datetime.now(timezone.utc),
    )

    __table_args__ = (Index("idx_cache_entries_kind", "kind"),)

    def __repr__(self) -> str:
        return f"<CacheEntryRecord(key={self.key[:12]}, kind={self.kind}, hits={self.hits})>"


__all__ = ["Base", "CacheEntryRecord"]
