"""Commands module."""
from . import cmd_bench  # type: ignore
from . import cmd_gradfeat_check  # type: ignore
from . import cmd_memory  # type: ignore
from . import cmd_metrics_sweep  # type: ignore
from . import cmd_solve  # type: ignore
from . import cmd_verify  # type: ignore

COMMANDS = [cmd_verify, cmd_bench, cmd_memory, cmd_metrics_sweep, cmd_gradfeat_check, cmd_solve]

__all__ = [
    "COMMANDS",
    "cmd_bench",
    "cmd_gradfeat_check",
    "cmd_memory",
    "cmd_metrics_sweep",
    "cmd_solve",
    "cmd_verify",
]
