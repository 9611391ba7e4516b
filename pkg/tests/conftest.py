import os

# must be set before treecount.core.config is imported
os.environ["DATABASE_URL"] = "sqlite://"
os.environ.setdefault("RECORD_RUNS", "true")

import pytest  # noqa: E402

from treecount.database import SessionLocal, init_db  # noqa: E402
from treecount.dimension import certify_lower, certify_upper  # noqa: E402


@pytest.fixture(scope="session", autouse=True)
def _schema():
    init_db()


@pytest.fixture
def db():
    session = SessionLocal()
    try:
        yield session
    finally:
        session.close()


@pytest.fixture(scope="session")
def lower_110():
    return certify_lower(110, 0.775, 5)


@pytest.fixture(scope="session")
def upper_799():
    return certify_upper(0.799, 5)
