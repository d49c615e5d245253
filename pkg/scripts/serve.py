#!/usr/bin/env python3
"""Run the HTTP service (and the web console if frontend/dist exists)."""

import argparse
from pathlib import Path

import uvicorn

from vargraph.service import create_app


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workspace", default="workspace")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--console", default=None,
                        help="static dir for the web console "
                             "(default: frontend/dist when present)")
    args = parser.parse_args()

    console = args.console
    if console is None:
        candidate = Path(__file__).resolve().parent.parent / "frontend" / "dist"
        console = candidate if candidate.is_dir() else None

    app = create_app(args.workspace, static_dir=console)
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
