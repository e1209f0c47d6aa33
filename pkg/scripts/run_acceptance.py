"""Run the acceptance criteria and exit with pytest's status."""

import sys
from pathlib import Path

import pytest

if __name__ == "__main__":
    root = Path(__file__).resolve().parent.parent
    sys.exit(pytest.main(["-q", "-m", "acceptance", str(root / "tests" / "test_acceptance.py")]))
