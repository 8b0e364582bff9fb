# Controllers Package
# One command handler module per CLI subcommand

from . import (
    compare_controller,
    export_controller,
    fit_controller,
    generate_controller,
    report_controller,
    simulate_controller,
    solve_controller,
)

COMMANDS = [
    generate_controller,
    fit_controller,
    simulate_controller,
    solve_controller,
    compare_controller,
    report_controller,
    export_controller,
]

__all__ = ["COMMANDS"]
