"""rcreport: render figures from experiment report files.

Either point at a spec file:

    rcreport render --spec figure.json

or list inputs directly:

    rcreport render cor_n300_c0.json cor_n300_c2.json --kind threshold_curve --out curve.png
"""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, FigureSpec, SchemaError, render

__all__ = ["main"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rcreport")
    sub = parser.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("render", help="render one figure")
    sp.add_argument("inputs", nargs="*", help="report files (JSON or CSV)")
    sp.add_argument("--spec", help="figure spec JSON ({inputs, kind, out, title?})")
    sp.add_argument("--kind", choices=FIGURE_KINDS)
    sp.add_argument("--out", help="output image path")
    sp.add_argument("--title")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.spec:
            spec = FigureSpec.from_json_file(args.spec)
        else:
            if not args.kind or not args.out:
                raise SchemaError("positional mode needs --kind and --out")
            spec = FigureSpec(inputs=tuple(args.inputs), kind=args.kind,
                              out=args.out, title=args.title)
        path = render(spec)
        print(path)
        return 0
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
