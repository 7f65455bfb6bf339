"""render_figures <config.json>

The config is either a list of figure specs or an object with a
"figures" list; each spec has keys input_csv, kind, output and an
optional filters mapping.
"""

from __future__ import annotations

import json
import sys

from .render import FigureSpec, SchemaError, render


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1 or argv[0] in ("-h", "--help"):
        print(__doc__.strip(), file=sys.stderr)
        return 0 if argv and argv[0] in ("-h", "--help") else 1
    try:
        with open(argv[0]) as fh:
            raw = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 1
    specs = raw["figures"] if isinstance(raw, dict) else raw
    try:
        for entry in specs:
            spec = FigureSpec(**entry)
            for path in render(spec):
                print(path)
    except (SchemaError, ValueError, OSError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
