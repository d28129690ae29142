"""
Run profile management and per-invocation configuration for the Floquet tools.
"""

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional
import logging

logger = logging.getLogger(__name__)

# Default config directory
CONFIG_DIR = Path.home() / '.floquet-conjugacy'
CONFIG_FILE = CONFIG_DIR / 'profiles.json'

DEFAULT_TOL = float(os.environ.get('FLOQUET_DEFAULT_TOL', '1e-10'))


class RunProfile:
    """Named defaults for tolerance, seed, thread count and output directory."""

    def __init__(self, name: str, tolerance: float = DEFAULT_TOL, seed: Optional[int] = None,
                 threads: int = 1, output_dir: Optional[str] = None):
        self.name = name
        self.tolerance = tolerance
        self.seed = seed
        self.threads = threads
        self.output_dir = output_dir

    def to_dict(self) -> Dict[str, Any]:
        """Convert profile to dictionary."""
        return {
            'name': self.name,
            'tolerance': self.tolerance,
            'seed': self.seed,
            'threads': self.threads,
            'output_dir': self.output_dir,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunProfile':
        """Create profile from dictionary."""
        return cls(
            name=data['name'],
            tolerance=float(data.get('tolerance', DEFAULT_TOL)),
            seed=data.get('seed'),
            threads=int(data.get('threads', 1)),
            output_dir=data.get('output_dir'),
        )


class ProfileManager:
    """Manages run profiles."""

    def __init__(self, config_file: Path = None):
        self.config_file = config_file or CONFIG_FILE
        self.profiles: Dict[str, RunProfile] = {}
        self.default_profile: Optional[str] = None
        self._load()

    def _load(self) -> None:
        """Load profiles from config file."""
        if not self.config_file.exists():
            return

        try:
            with open(self.config_file, 'r') as f:
                data = json.load(f)

            self.profiles = {
                name: RunProfile.from_dict(profile_data)
                for name, profile_data in data.get('profiles', {}).items()
            }
            self.default_profile = data.get('default_profile')
        except Exception as e:
            logger.warning(f"Failed to load profiles: {e}")
            self.profiles = {}
            self.default_profile = None

    def _save(self) -> None:
        """Save profiles to config file."""
        self.config_file.parent.mkdir(parents=True, exist_ok=True)

        data = {
            'profiles': {name: profile.to_dict() for name, profile in self.profiles.items()},
            'default_profile': self.default_profile
        }

        try:
            with open(self.config_file, 'w') as f:
                json.dump(data, f, indent=2)
        except Exception as e:
            logger.error(f"Failed to save profiles: {e}")
            raise

    def add_profile(self, profile: RunProfile) -> None:
        """Add or update a profile."""
        self.profiles[profile.name] = profile
        self._save()

    def get_profile(self, name: str) -> Optional[RunProfile]:
        return self.profiles.get(name)

    def list_profiles(self) -> List[str]:
        return list(self.profiles.keys())

    def remove_profile(self, name: str) -> bool:
        """Remove a profile; clears the default if it pointed there."""
        if name in self.profiles:
            del self.profiles[name]
            if self.default_profile == name:
                self.default_profile = None
            self._save()
            return True
        return False

    def set_default(self, name: str) -> bool:
        if name in self.profiles:
            self.default_profile = name
            self._save()
            return True
        return False

    def get_default(self) -> Optional[RunProfile]:
        if self.default_profile:
            return self.profiles.get(self.default_profile)
        return None


@dataclass
class RunConfig:
    """
    Settings for one CLI invocation.

    Exactly one of ``seed`` and ``forced_outcomes`` drives measurement
    outcomes; commands that draw no outcomes leave both unset.
    """

    command: str
    inputs: List[str] = field(default_factory=list)
    seed: Optional[int] = None
    forced_outcomes: Optional[List[int]] = None
    tolerance: float = DEFAULT_TOL
    threads: int = 1
    output: Optional[str] = None

    def __post_init__(self):
        if self.seed is not None and self.forced_outcomes is not None:
            raise ValueError("use either a seed or a forced outcome stream, not both")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.threads < 1:
            raise ValueError(f"threads must be at least 1, got {self.threads}")

    @classmethod
    def from_args(cls, args: Dict[str, Any], manager: Optional[ProfileManager] = None) -> 'RunConfig':
        """Merge CLI arguments over the named (or default) profile."""
        profile = None
        name = args.get('profile')
        if name:
            manager = manager or ProfileManager()
            profile = manager.get_profile(name)
            if profile is None:
                raise ValueError(f"Profile '{name}' not found")
        elif manager is not None:
            profile = manager.get_default()

        forced = args.get('forced_outcomes')
        seed = args.get('seed')
        if seed is None and forced is None and profile is not None:
            seed = profile.seed
        if seed is None and forced is None:
            seed = 0
        tolerance = args.get('tol')
        if tolerance is None:
            tolerance = profile.tolerance if profile else DEFAULT_TOL
        threads = args.get('threads')
        if threads is None:
            threads = profile.threads if profile else 1
        output = args.get('output')
        if output is None and profile is not None and profile.output_dir:
            output = str(Path(profile.output_dir) / f"{args.get('command', 'report')}.json")
        inputs = args.get('input')
        if isinstance(inputs, str):
            inputs = [inputs]
        return cls(command=args.get('command') or '', inputs=list(inputs or []), seed=seed,
                   forced_outcomes=forced, tolerance=float(tolerance), threads=int(threads),
                   output=output)
