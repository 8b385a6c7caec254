import logging
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

from sqlalchemy import Engine, create_engine
from sqlalchemy.orm import Session, sessionmaker

from app.config import settings
from app.db.orm_models import Base

logger = logging.getLogger(__name__)

# Engine and session factory - initialized in init_db() on first cache use
_engine: Engine | None = None
_session_factory: sessionmaker[Session] | None = None
_database_path: Path | None = None


def _create_session_factory(engine: Engine) -> sessionmaker[Session]:
    """Create session factory from engine."""
    return sessionmaker(
        engine,
        class_=Session,
        expire_on_commit=False,
        autoflush=False,
    )


def get_session_factory() -> sessionmaker[Session]:
    """Get the session factory (initialized in init_db)."""
    if _session_factory is None:
        raise RuntimeError("Cache index not initialized. Call init_db() first.")
    return _session_factory


def init_db(cache_dir: Path | None = None) -> Path:
    """Open (and create if needed) the SQLite index under the cache directory."""
    global _engine, _session_factory, _database_path

    cache_dir = Path(cache_dir or settings.cache_dir)
    database_path = (cache_dir / "index.sqlite").resolve()
    if _engine is not None and _database_path == database_path:
        return database_path
    close_db()

    cache_dir.mkdir(parents=True, exist_ok=True)
    logger.debug("Initializing cache index at %s", database_path)
    _engine = create_engine(f"sqlite:///{database_path}", echo=False, future=True)
    Base.metadata.create_all(_engine)
    _session_factory = _create_session_factory(_engine)
    _database_path = database_path
    return database_path


def close_db() -> None:
    """Dispose the engine, e.g. before switching cache directories."""
    global _engine, _session_factory, _database_path
    if _engine is not None:
        _engine.dispose()
        logger.debug("Cache index connections closed")
    _engine = None
    _session_factory = None
    _database_path = None


@contextmanager
def session_scope(*, begin: bool = True) -> Iterator[Session]:
    """
    Provide a session context manager with optional automatic transaction handling.

    Args:
        begin: When True (default), wrap the session in `session.begin()` for auto commit/rollback.
               When False, caller is responsible for transaction demarcation and commit/rollback.
    """
    session_factory = get_session_factory()

    with session_factory() as session:
        if begin:
            with session.begin():
                yield session
        else:
            try:
                yield session
            except Exception:
                session.rollback()
                raise
            else:
                session.commit()
