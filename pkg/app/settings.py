"""Environment-driven defaults."""

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

PROJECT_ROOT = Path(__file__).parent.parent
GOLDEN_DIR = PROJECT_ROOT / "tests" / "golden"

DEFAULT_OUT_DIR = "artifacts"
DEFAULT_THREADS = 1
DEFAULT_DP_GUARD = 8192

# Schema version of the per-checkpoint CSV
CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "experiment",
    "checkpoint_n",
    "replicate_count",
    "statistic_name",
    "value",
    "target",
    "tolerance",
    "verdict",
)


def get_out_dir() -> Path:
    """Get artifact directory from environment or use default."""
    return Path(os.getenv("COMBWALK_OUT_DIR", DEFAULT_OUT_DIR))


def get_threads() -> int:
    """Get default worker count from environment."""
    return int(os.getenv("COMBWALK_THREADS", DEFAULT_THREADS))


def get_dp_guard() -> int:
    """Largest step count the kernel DP accepts."""
    return int(os.getenv("COMBWALK_DP_GUARD", DEFAULT_DP_GUARD))
