"""Migration environment for the run-recording schema."""
from logging.config import fileConfig
import os
import sys

from alembic import context
from sqlalchemy import create_engine, pool

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

config = context.config

if config.config_file_name is not None:
    fileConfig(config.config_file_name)

from batched_fmaps.config import SQLALCHEMY_CONNECTION_STRING  # noqa: E402
from batched_fmaps.models import Base  # noqa: E402

target_metadata = Base.metadata


def _url() -> str:
    # SQLALCHEMY_CONNECTION_STRING wins over alembic.ini so the CLI and migrations share one database
    return SQLALCHEMY_CONNECTION_STRING or config.get_main_option("sqlalchemy.url")


def run_migrations_offline() -> None:
    """Emit the migration SQL without connecting."""
    url = _url()
    context.configure(
        url=url,
        target_metadata=target_metadata,
        literal_binds=True,
        dialect_opts={"paramstyle": "named"},
        render_as_batch=url.startswith("sqlite"),
    )

    with context.begin_transaction():
        context.run_migrations()


def run_migrations_online() -> None:
    # Not get_engine(): that one creates the tables the migrations are about to create
    engine = create_engine(_url(), poolclass=pool.NullPool)
    with engine.connect() as connection:
        context.configure(
            connection=connection,
            target_metadata=target_metadata,
            render_as_batch=connection.dialect.name == "sqlite",
        )

        with context.begin_transaction():
            context.run_migrations()


if context.is_offline_mode():
    run_migrations_offline()
else:
    run_migrations_online()
