#!/usr/bin/env python3
"""
Hypergraph absorption toolkit - Main Entry Point
"""

import sys

from src.core.utils import print_usage, setup_logging
from src.core.config import config

logger = setup_logging()


def main():
    """Main application entry point"""
    valid, errors = config.validate()
    if not valid:
        for error in errors:
            logger.error(f"❌ Configuration error: {error}")
        sys.exit(2)

    if len(sys.argv) > 1 and sys.argv[1] == "api":
        import uvicorn
        from src.api.app import app
        logger.info(f"🚀 Starting FastAPI server on {config.api_host}:{config.api_port}...")
        uvicorn.run(app, host=config.api_host, port=config.api_port)
        return

    if len(sys.argv) > 1 and sys.argv[1] in ("-h", "--help", "help"):
        print_usage()

    from src.cli import run
    argv = sys.argv[2:] if len(sys.argv) > 1 and sys.argv[1] == "cli" else sys.argv[1:]
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
