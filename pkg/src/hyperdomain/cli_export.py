from __future__ import annotations

import argparse

from hyperdomain.cli_common import EXIT_OK, add_common, glue_option_values, guarded
from hyperdomain.cli_fiber import add_system_arguments
from hyperdomain.files import read_domain, write_system
from hyperdomain.manifold import build_system


def add_arguments(ap: argparse.ArgumentParser) -> None:
    add_system_arguments(ap)
    ap.add_argument("--out", default="system.json", help="Output system file")
    add_common(ap, seed=False, json_out=False)


def run(args: argparse.Namespace) -> int:
    s = build_system(read_domain(args.file), args.d)
    p = write_system(s, args.out)
    print(f"Wrote: {p}")
    print(f"N={s.ambient_dim} L={s.L} dim M={s.manifold_dim} compact={s.is_compact}")
    return EXIT_OK


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="Export the polynomial system of M as JSON")
    add_arguments(ap)
    args = ap.parse_args(glue_option_values(argv))
    return guarded(run, args)


if __name__ == "__main__":
    raise SystemExit(main())
