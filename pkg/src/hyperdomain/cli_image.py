from __future__ import annotations

import argparse

from hyperdomain.cli_common import EXIT_OK, add_common, glue_option_values, guarded
from hyperdomain.cli_fiber import add_system_arguments
from hyperdomain.fibers import image_estimate
from hyperdomain.files import read_domain, write_json
from hyperdomain.manifold import build_system


def add_arguments(ap: argparse.ArgumentParser) -> None:
    add_system_arguments(ap)
    ap.add_argument("--grid", type=int, default=401, help="Grid points over the padded range")
    ap.add_argument("--pad", type=float, default=0.5, help="Padding on each side, as a fraction of the span")
    add_common(ap, seed=False)


def run(args: argparse.Namespace) -> int:
    s = build_system(read_domain(args.file), args.d)
    est = image_estimate(s, grid_size=args.grid, pad=args.pad)
    print(f"image of f: [{est.lo:.6g}, {est.hi:.6g}] (grid step {est.step:.3g})")
    if args.json:
        p = write_json(dict(est.to_dict(), t=list(s.domain.t)), args.json)
        print(f"Wrote: {p}")
    return EXIT_OK


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="Estimate the image of f on a grid")
    add_arguments(ap)
    args = ap.parse_args(glue_option_values(argv))
    return guarded(run, args)


if __name__ == "__main__":
    raise SystemExit(main())
