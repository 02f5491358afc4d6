import os

DEFAULT_BIT_BUDGET = 1 << 24
DEFAULT_POINT_BUDGET = 10**7


def bit_budget(override=None):
    """Effective bit budget: explicit override, then $ATL_BIT_BUDGET, then default."""
    if override is not None:
        return int(override)
    env = os.environ.get("ATL_BIT_BUDGET")
    if env:
        return int(env)
    return DEFAULT_BIT_BUDGET
