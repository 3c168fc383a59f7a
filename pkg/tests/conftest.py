import json
import subprocess
import sys
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def run_cli(*args, **kwargs):
    """Invoke the CLI in a subprocess, returning (exit_code, stdout, stderr)."""
    proc = subprocess.run(
        [sys.executable, "-m", "shapeinv.cli", *map(str, args)],
        capture_output=True, text=True, **kwargs)
    return proc.returncode, proc.stdout, proc.stderr


def stderr_diag(stderr: str) -> dict:
    """Parse the first JSON diagnostic line from stderr."""
    for line in stderr.splitlines():
        line = line.strip()
        if line.startswith("{"):
            return json.loads(line)
    raise AssertionError(f"no JSON diagnostic on stderr: {stderr!r}")


@pytest.fixture
def cli():
    return run_cli
