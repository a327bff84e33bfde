import os
import sys
from dataclasses import replace

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hbtsim.scenarios import builtin_scenario, run_scenario


@pytest.fixture(scope="session")
def scenario():
    """Run builtin scenarios once per session (they cost seconds each)."""
    cache = {}

    def get(name, **overrides):
        key = (name, tuple(sorted(overrides.items())))
        if key not in cache:
            cfg = builtin_scenario(name)
            if overrides:
                cfg = replace(cfg, **overrides)
            cache[key] = run_scenario(cfg)
        return cache[key]

    return get
