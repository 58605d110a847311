from __future__ import annotations

import argparse

import pandas as pd

from hyperdomain.cli_common import EXIT_OK, add_common, glue_option_values, guarded, parse_floats, parse_ints
from hyperdomain.domain import build_domain, corners
from hyperdomain.files import write_domain


def corner_table(d) -> pd.DataFrame:
    rows = [
        dict(x1=c.x1, factor=c.factor, kind=d.factors[c.factor].kind, plane=f"(x1, x{c.v})", xv=c.xv, pair=list(c.pair))
        for c in corners(d)
    ]
    return pd.DataFrame(rows, columns=["x1", "factor", "kind", "plane", "xv", "pair"])


def add_arguments(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--t", required=True, type=parse_floats, help="Strictly increasing values t_1,...,t_l")
    ap.add_argument("--labels", type=parse_ints, default=None, help="0/1 per interval (t_j, t_j+1); default all 0")
    ap.add_argument("--mode", choices=["minimal", "literal"], default="minimal")
    ap.add_argument("--rho", type=float, default=None, help="Pinch radius (default (t_l - t_1) / 4)")
    ap.add_argument("--out", default="domain.json", help="Output domain file")
    add_common(ap, seed=False, json_out=False)


def run(args: argparse.Namespace) -> int:
    labels = args.labels if args.labels is not None else [0] * (len(args.t) - 1)
    d = build_domain(args.t, labels, args.mode, args.rho)
    path = write_domain(d, args.out)

    print(f"Wrote: {path}")
    print(f"mode={d.mode} n={d.n} L={d.L} factors={[f.kind for f in d.factors]}")
    for note in d.extensions:
        print(f"extension: {note}")
    print(corner_table(d).to_string(index=False))
    return EXIT_OK


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="Build a domain from t and interval labels")
    add_arguments(ap)
    args = ap.parse_args(glue_option_values(argv))
    return guarded(run, args)


if __name__ == "__main__":
    raise SystemExit(main())
