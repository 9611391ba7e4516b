# treecount/models.py
from __future__ import annotations

from datetime import datetime, timezone

from sqlalchemy import Boolean, Column, DateTime, Integer, String, Text, UniqueConstraint
from sqlalchemy.orm import declarative_base

Base = declarative_base()


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class CensusCache(Base):
    __tablename__ = "census_cache"
    __table_args__ = (UniqueConstraint("n", "planar", name="uq_census_n_planar"),)

    id = Column(Integer, primary_key=True)
    n = Column(Integer, index=True, nullable=False)
    planar = Column(Boolean, nullable=False, default=True)

    # the census JSON payload, verbatim
    values_json = Column(Text, nullable=False)
    graph_count = Column(Integer, nullable=False, default=0)
    artifact_version = Column(String(16), nullable=False)

    created_at = Column(DateTime(timezone=True), nullable=False, default=_utcnow)


class RunRecord(Base):
    __tablename__ = "run_records"

    id = Column(Integer, primary_key=True)
    command = Column(String(512), index=True, nullable=False)
    inputs = Column(Text, nullable=False)     # JSON
    outputs = Column(Text, nullable=True)     # JSON
    argv = Column(Text, nullable=True)        # JSON list, replayed verbatim
    exit_code = Column(Integer, nullable=False, default=0)
    artifact_version = Column(String(16), index=True, nullable=False)

    created_at = Column(DateTime(timezone=True), nullable=False, default=_utcnow)
