# treecount/main.py
from __future__ import annotations

import logging
import sys
from typing import Optional

from treecount.cli.commands import TreecountCLI
from treecount.core.config import settings
from treecount.database import init_db

logger = logging.getLogger(__name__)


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=settings.LOG_LEVEL)

    try:
        init_db()
    except Exception:
        logger.exception("DB init failed. Commands still run, but caching and run records are unavailable.")

    cli = TreecountCLI()
    cli.initialize()
    return cli.run(argv)


if __name__ == "__main__":
    sys.exit(main())
