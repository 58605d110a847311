from __future__ import annotations

import argparse
from pathlib import Path

from hyperdomain.cli_common import EXIT_OK, add_common, add_domain_file, glue_option_values, guarded, parse_window
from hyperdomain.files import read_domain
from hyperdomain.svg import render_factor_svg


def add_arguments(ap: argparse.ArgumentParser) -> None:
    add_domain_file(ap)
    ap.add_argument("--factor", type=int, default=0, help="Factor index (0 is the lens)")
    ap.add_argument("--out", default="", help="Output SVG (default factor_<index>.svg)")
    ap.add_argument("--window", type=parse_window, default=None, help="xmin,xmax,ymin,ymax")
    add_common(ap, seed=False, json_out=False)


def run(args: argparse.Namespace) -> int:
    d = read_domain(args.file)
    text = render_factor_svg(d, args.factor, args.window)
    p = Path(args.out or f"factor_{args.factor}.svg").expanduser()
    p.write_text(text)
    print(f"Wrote: {p}")
    return EXIT_OK


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="Render one factor domain as SVG")
    add_arguments(ap)
    args = ap.parse_args(glue_option_values(argv))
    return guarded(run, args)


if __name__ == "__main__":
    raise SystemExit(main())
