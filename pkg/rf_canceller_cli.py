"""Simple CLI util for running the RF canceller simulator.

This module imports and executes the main function from scripts.run_scenario
when run as a script.
"""

import sys

from scripts.run_scenario import main


def run_main() -> None:
    """Runs the main function from scripts.run_scenario.

    In project root directory, run:

    poetry run python -m rf_canceller_cli list
    """
    sys.exit(main())


if __name__ == "__main__":
    run_main()
