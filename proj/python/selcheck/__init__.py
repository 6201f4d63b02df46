"""Selective actuation-command checking for partitioned real-time systems."""

from ._core import *  # noqa: F401,F403
from ._core import CheckPlan, Infeasible, Taskset

__version__ = "1.0.0"


def plan_or_raise(taskset: Taskset, **options) -> CheckPlan:
    """Like plan(), but raises ValueError when minimum checking already breaks a deadline."""
    result = plan(taskset, **options)  # noqa: F405
    if isinstance(result, Infeasible):
        raise ValueError(f"minimum QoS requirements cannot be met for tasks {result.violating}")
    return result
