"""Configuration constants for multihead.

Values are loaded from ~/.config/multihead/config.toml when it exists.
"""

from .user_config import get

# Exploration caps
NODE_BUDGET = get("budgets", "nodes", 10_000_000)
SUBSET_BUDGET = get("budgets", "subsets", 2**20)
AFA_STATE_CAP = get("budgets", "afa_states", 6)
PRODUCT_BUDGET = get("budgets", "product_nodes", 10_000_000)

# Tracked-tape simulation
SIM_STEP_BUDGET = get("ntmsim", "step_budget", 1_000_000)
EXHAUSTIVE_MAX_LEN = get("ntmsim", "exhaustive_max_len", 12)
MIN_WINDOW = get("ntmsim", "min_window", 4)

# Sweeps
SWEEP_WORKERS = get("sweep", "workers", 1)

# Logging
LOG_LEVEL = get("logging", "level", "WARNING")
LOG_FILE = get("logging", "file", "")
LOG_FORMAT = "%(asctime)s %(levelname)s: %(message)s"
LOG_DATEFMT = "%H:%M:%S"
