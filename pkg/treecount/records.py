# treecount/records.py
from __future__ import annotations

import json
import shlex
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

from sqlalchemy import desc
from sqlalchemy.orm import Session

from treecount import models
from treecount.core.config import settings


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


def create_run_record(
    db: Session,
    *,
    command: str,
    inputs: Dict[str, Any],
    outputs: Any = None,
    exit_code: int = 0,
    argv: Optional[Sequence[str]] = None,
) -> models.RunRecord:
    command = command.strip()
    if not command:
        raise ValueError("command must be non-empty")

    row = models.RunRecord(
        command=command,
        inputs=json.dumps(inputs, sort_keys=True, default=str),
        outputs=(json.dumps(outputs, sort_keys=True, default=str) if outputs is not None else None),
        argv=(json.dumps(list(argv)) if argv is not None else None),
        exit_code=exit_code,
        artifact_version=settings.ARTIFACT_VERSION,
        created_at=_utcnow(),
    )
    db.add(row)
    db.commit()
    db.refresh(row)
    return row


def list_run_records(
    db: Session,
    *,
    command: Optional[str] = None,
    limit: int = 10,
) -> List[models.RunRecord]:
    q = db.query(models.RunRecord)
    if command:
        q = q.filter(models.RunRecord.command.startswith(command.strip()))
    return q.order_by(desc(models.RunRecord.id)).limit(limit).all()


def record_argv(record: models.RunRecord) -> List[str]:
    """The stored argument vector; rows written without one fall back to shell-splitting the command."""
    if record.argv:
        return list(json.loads(record.argv))
    return shlex.split(record.command)


def replay_matches(record: models.RunRecord, outputs: Any) -> bool:
    """A replay reproduces a record when its serialized outputs are identical."""
    if record.artifact_version != settings.ARTIFACT_VERSION:
        return False
    fresh = json.dumps(outputs, sort_keys=True, default=str) if outputs is not None else None
    return fresh == record.outputs
