"""Database connection for recording benchmark and verification runs."""
from sqlalchemy import create_engine, Engine
from sqlalchemy.orm import sessionmaker

from batched_fmaps.models import Base
from batched_fmaps.config import SQLALCHEMY_CONNECTION_STRING

_db_engine: Engine | None = None
_session_maker: sessionmaker | None = None


def get_engine() -> Engine:
    """Get database engine, creating it and any missing tables if necessary"""
    global _db_engine
    if _db_engine is None:
        if SQLALCHEMY_CONNECTION_STRING is None:
            raise ValueError("SQLALCHEMY_CONNECTION_STRING environment variable not set")

        _db_engine = create_engine(
            SQLALCHEMY_CONNECTION_STRING,
            echo=False,
            pool_pre_ping=True,
        )
        # Managed databases are migrated with alembic; this only fills gaps (e.g. a fresh sqlite file)
        Base.metadata.create_all(_db_engine)

    return _db_engine


def get_session_maker() -> sessionmaker:
    """Get session maker, creating it if necessary"""
    global _session_maker
    if _session_maker is None:
        _session_maker = sessionmaker(bind=get_engine())
    return _session_maker
