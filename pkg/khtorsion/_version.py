"""Version information for khtorsion."""

import subprocess
from pathlib import Path

FALLBACK_VERSION = "0.1.0"


def get_version() -> str:
    """Version from the latest git tag, or the hardcoded fallback."""
    try:
        result = subprocess.run(
            ['git', 'describe', '--tags', '--abbrev=0'],
            cwd=Path(__file__).parent.parent,
            capture_output=True,
            text=True,
            check=True
        )
        return result.stdout.strip().lstrip('v')
    except (subprocess.CalledProcessError, FileNotFoundError):
        return FALLBACK_VERSION


__version__ = get_version()
