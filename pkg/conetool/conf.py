"""
Settings access for conetool.

Every knob is read from ``django.conf.settings`` when settings are configured
and falls back to the process environment otherwise, so the library can be
used from plain scripts as well as from a Django project.
"""

import os
from typing import Dict

from django.conf import settings

DEFAULT_BUDGET_CAP = 100_000
DEFAULT_SAMPLE_BOX = 50
DEFAULT_SAMPLE_ATTEMPTS = 200

# Built-in budget defaults; CONETOOL_DEFAULT_BUDGETS may override any of them.
BUILTIN_BUDGETS = {
    "radius": 6,
    "fuel": 64,
    "samples": 500,
    "seed": 0,
}


def _setting(name, default=None):
    if settings.configured:
        return getattr(settings, name, default)
    return default


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def get_budget_cap() -> int:
    """Maximum number of group elements any orbit ball may hold."""
    value = _setting("CONETOOL_BUDGET_CAP")
    if value is None:
        value = _env_int("CONETOOL_BUDGET_CAP", DEFAULT_BUDGET_CAP)
    return int(value)


def get_sample_box() -> int:
    """Half-width B of the lattice box [-B, B]^n used for interior sampling."""
    value = _setting("CONETOOL_SAMPLE_BOX")
    if value is None:
        value = _env_int("CONETOOL_SAMPLE_BOX", DEFAULT_SAMPLE_BOX)
    return int(value)


def get_sample_attempts() -> int:
    return int(_setting("CONETOOL_SAMPLE_ATTEMPTS", DEFAULT_SAMPLE_ATTEMPTS))


def get_default_budgets() -> Dict[str, int]:
    budgets = dict(BUILTIN_BUDGETS)
    overrides = _setting("CONETOOL_DEFAULT_BUDGETS", None) or {}
    for key, value in overrides.items():
        if key in budgets:
            budgets[key] = int(value)
    return budgets
