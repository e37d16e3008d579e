"""initial bench schema

Revision ID: 001
Revises:
Create Date: 2026-10-18 12:00:00.000000

"""
from typing import Sequence, Union

from alembic import op
import sqlalchemy as sa

# revision identifiers, used by Alembic.
revision: str = '001'
down_revision: Union[str, Sequence[str], None] = None
branch_labels: Union[str, Sequence[str], None] = None
depends_on: Union[str, Sequence[str], None] = None


def upgrade() -> None:
    """Upgrade schema."""
    op.create_table('bench_runs',
    sa.Column('id', sa.String(length=36), nullable=False),
    sa.Column('command', sa.String(length=32), nullable=False),
    sa.Column('status', sa.String(length=16), nullable=False),
    sa.Column('started_at', sa.String(length=64), nullable=False),
    sa.Column('finished_at', sa.String(length=64), nullable=True),
    sa.Column('config', sa.JSON(), nullable=True),
    sa.Column('environment', sa.JSON(), nullable=True),
    sa.Column('error', sa.Text(), nullable=True),
    sa.PrimaryKeyConstraint('id', name=op.f('pk_bench_runs'))
    )
    op.create_table('bench_results',
    sa.Column('id', sa.Integer(), autoincrement=True, nullable=False),
    sa.Column('run_id', sa.String(length=36), nullable=False),
    sa.Column('k', sa.Integer(), nullable=False),
    sa.Column('solver', sa.String(length=32), nullable=False),
    sa.Column('median_ms', sa.Float(), nullable=True),
    sa.Column('max_abs_diff', sa.Float(), nullable=True),
    sa.Column('peak_extra_bytes', sa.BigInteger(), nullable=True),
    sa.Column('flagged', sa.Boolean(), nullable=False),
    sa.ForeignKeyConstraint(['run_id'], ['bench_runs.id'],
                            name=op.f('fk_bench_results_run_id_bench_runs')),
    sa.PrimaryKeyConstraint('id', name=op.f('pk_bench_results'))
    )
    op.create_index('idx_bench_results_run_k', 'bench_results', ['run_id', 'k'], unique=False)


def downgrade() -> None:
    """Downgrade schema."""
    op.drop_index('idx_bench_results_run_k', table_name='bench_results')
    op.drop_table('bench_results')
    op.drop_table('bench_runs')
