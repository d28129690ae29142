"""
Tests for entry point execution (if __name__ == '__main__').
"""

import json
import subprocess
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent


class TestEntryPoints:
    """Test entry point execution."""

    def test_floquet_cli_entry_point(self):
        from tools.floquet.cli import main

        assert callable(main)

    def test_profile_cli_entry_point(self):
        from tools.profile_cli import main

        assert callable(main)

    def test_floquet_cli_runs_as_script(self, tmp_path):
        """The script path works without the package on sys.path."""
        completed = subprocess.run(
            [sys.executable, str(ROOT / 'tools' / 'floquet' / 'cli.py'), '--describe'],
            capture_output=True, text=True, cwd=tmp_path, check=False,
        )
        assert completed.returncode == 0
        assert json.loads(completed.stdout)['plugin']['name'] == 'floquet'


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
