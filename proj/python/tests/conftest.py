import os
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def bundled():
    root = Path(os.environ.get("FLEXBILL_SOURCE_DIR", Path(__file__).resolve().parents[2]))
    return root / "bundled"
