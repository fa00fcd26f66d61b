"""Main entry point for the near-field DAP command line."""

import logging
import sys

from nearfield_dap.cli import app
from nearfield_dap.config import settings


def setup_logging() -> None:
    """Configure logging for the application."""
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def main() -> None:
    """Run the near-field DAP command line."""
    setup_logging()
    logging.getLogger(__name__).debug("[Near-field DAP] Starting command line")
    app(prog_name="nearfield-dap")


if __name__ == "__main__":
    main()
