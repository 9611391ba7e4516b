# treecount/cache.py
from __future__ import annotations

import logging
from datetime import datetime, timezone
from typing import Optional

from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import Session

from treecount import models
from treecount.census import enumerate_T
from treecount.core.config import settings
from treecount.schemas import CensusOut

logger = logging.getLogger(__name__)


def _utcnow():
    return datetime.now(timezone.utc)


# ---------- Census ----------

def get_census(db: Session, n: int, planar: bool = True) -> Optional[models.CensusCache]:
    return (
        db.query(models.CensusCache)
        .filter(
            models.CensusCache.n == n,
            models.CensusCache.planar == planar,
            models.CensusCache.artifact_version == settings.ARTIFACT_VERSION,
        )
        .first()
    )


def save_census(db: Session, n: int, planar: bool, payload: str, graph_count: int) -> models.CensusCache:
    row = (
        db.query(models.CensusCache)
        .filter(models.CensusCache.n == n, models.CensusCache.planar == planar)
        .first()
    )
    if row is None:
        row = models.CensusCache(n=n, planar=planar)
    row.values_json = payload
    row.graph_count = graph_count
    row.artifact_version = settings.ARTIFACT_VERSION
    row.created_at = _utcnow()
    db.add(row)
    db.commit()
    db.refresh(row)
    return row


def cached_census(db: Optional[Session], n: int, planar: bool = True, workers: Optional[int] = None) -> tuple[str, bool]:
    """Census payload for (n, planar) and whether it came from the cache."""
    if db is not None and settings.CACHE_ENABLED:
        try:
            row = get_census(db, n, planar)
            if row is not None:
                return row.values_json, True
        except SQLAlchemyError:
            logger.warning("census cache read failed", exc_info=True)
            db.rollback()

    result = enumerate_T(n, planar, workers)
    payload = CensusOut.from_result(result).model_dump_json()
    if db is not None and settings.CACHE_ENABLED:
        try:
            save_census(db, n, planar, payload, result.graph_count)
        except SQLAlchemyError:
            logger.warning("census cache write failed", exc_info=True)
            db.rollback()
    return payload, False
