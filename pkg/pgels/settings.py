"""
PGels Bench - Default Parameters
================================
This is the source of truth for solver constants and benchmark defaults.
Environment variables (or a .env file) override the harness settings.
"""

import os

from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def env_setting(name: str, default, cast=str):
    """Read an environment override, falling back to the default."""
    value = os.getenv(name)
    if value is None or value == "":
        return default
    try:
        return cast(value)
    except ValueError as e:
        raise ValueError(f"Invalid value for {name}: {value!r}") from e


# Line-search constants shared by every benchmark run
LINE_SEARCH_DEFAULTS = {
    "c": 1e-4,
    "tau": 2.0,
    "eta": 0.8,
    "window": 2,
    "beta_max": 10.0,
    "mu_min": 1e-6,
    "mu0": 1.0,
}

# Problem families and the experiment grids they are benchmarked on
FAMILY_DEFAULTS = {
    "logistic-l1": {
        "description": "l1 regularized logistic regression",
        "delta": 0.1,
        "lambdas": [1.0, 0.1],
        "j_values": [3, 5, 10],
        "algorithms": ["pgels", "npg", "pg", "fista", "refista"],
    },
    "ls-l1l2": {
        "description": "l1-2 regularized least squares",
        "delta": 0.9,
        "lambdas": [0.1, 0.01],
        "j_values": [3, 5, 10],
        "algorithms": ["pgels", "npg", "pdcae"],
    },
}

# Harness settings
BENCH = {
    "output_dir": env_setting("BENCH_OUTPUT_DIR", "results"),
    "workers": env_setting("BENCH_WORKERS", 1, int),
    "log_level": env_setting("BENCH_LOG_LEVEL", "INFO"),
    "seed": env_setting("BENCH_SEED", 0, int),
    "grid_points": 200,
    "inner_cap": 100,
    "restart_interval": 200,
    "trials": 10,
}


def family_defaults(family: str) -> dict:
    """Get the default settings for a problem family."""
    if family not in FAMILY_DEFAULTS:
        raise ValueError(f"Unknown problem family: {family}")
    return FAMILY_DEFAULTS[family]
