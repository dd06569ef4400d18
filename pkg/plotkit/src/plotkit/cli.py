"""Command-line entry point: ``plotkit <figure.json>``."""

from __future__ import annotations

import argparse
import json
import sys

from .figures import PlotkitError, load_spec, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render a figure from a JSON figure spec and CSV inputs.")
    parser.add_argument("figure_json", help="path to a FigureSpec JSON file")
    args = parser.parse_args(argv)
    try:
        spec = load_spec(args.figure_json)
        out = render(spec)
    except (PlotkitError, OSError, json.JSONDecodeError) as exc:
        print(f"plotkit: error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
