"""User configuration file management.

Loads user configuration from ~/.config/multihead/config.toml
"""

import functools
import logging
try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

log = logging.getLogger(__name__)

CONFIG_DIR = Path.home() / ".config" / "multihead"
CONFIG_FILE = CONFIG_DIR / "config.toml"

DEFAULT_CONFIG = """\
# multihead configuration
# Edit this file to customize settings. Delete to reset to defaults.

[budgets]
# Configuration-graph nodes explored per (machine, input)
nodes = 10000000
# One-way automaton states / subsets generated by the halting pipeline
subsets = 1048576
# Largest number of non-accepting 2AFA states handed to afa_to_onfa
afa_states = 6
# Adversary product-graph nodes
product_nodes = 10000000

[ntmsim]
step_budget = 1000000
exhaustive_max_len = 12
min_window = 4

[sweep]
# Worker processes for strong-error sweeps (1 = in process)
workers = 1

[logging]
level = "WARNING"
# Optional log file; empty logs to stderr only
file = ""
"""


def ensure_config_exists() -> Path:
    """Create default config file if it doesn't exist."""
    if not CONFIG_FILE.exists():
        CONFIG_DIR.mkdir(parents=True, exist_ok=True)
        CONFIG_FILE.write_text(DEFAULT_CONFIG)
        log.info(f"Created default config at {CONFIG_FILE}")
    return CONFIG_FILE


@functools.lru_cache(maxsize=1)
def load_config() -> dict:
    """Load configuration from the user config file, if there is one."""
    if not CONFIG_FILE.exists():
        return {}
    try:
        with open(CONFIG_FILE, "rb") as f:
            return tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as e:
        log.warning(f"Failed to load config from {CONFIG_FILE}: {e}")
        return {}


def get(section: str, key: str, default):
    """Get a config value with fallback to default."""
    value = load_config().get(section, {}).get(key, default)
    if type(value) is not type(default):
        log.warning(f"Ignoring [{section}] {key} = {value!r}: expected {type(default).__name__}")
        return default
    return value
