from __future__ import annotations

import argparse

import pandas as pd

from hyperdomain.cli_common import (
    EXIT_CHECKS_FAILED,
    EXIT_OK,
    add_common,
    add_domain_file,
    glue_option_values,
    guarded,
    resolve_seed,
)
from hyperdomain.files import read_domain, write_json
from hyperdomain.nc_check import NcCheckConfig, check_nc


def add_arguments(ap: argparse.ArgumentParser) -> None:
    add_domain_file(ap)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--box-radius", type=float, default=None, help="Probe box half-width (default 5 * span)")
    ap.add_argument("--literal-report", action="store_true", help="Also print witnesses and the full rank table")
    add_common(ap)


def run(args: argparse.Namespace) -> int:
    d = read_domain(args.file)
    cfg = NcCheckConfig(samples=args.samples, tol=args.tol, box_radius=args.box_radius, seed=resolve_seed(args))
    report = check_nc(d, cfg)

    print(report.table().to_string(index=False))
    deficient = report.conditions["5"].measured.get("deficient", [])
    if deficient:
        print("\nRank-deficient intersections:")
        print(pd.DataFrame(deficient, columns=["x1", "hypersurfaces", "size", "rank"]).to_string(index=False))

    if args.literal_report:
        for key, c in sorted(report.conditions.items()):
            for w in c.witnesses:
                print(f"condition {key} witness: {w}")
        print("\nRank table:")
        print(pd.DataFrame(report.rank_table, columns=["x1", "hypersurfaces", "size", "rank", "smallest_sv"]).to_string(index=False))

    if args.json:
        p = write_json(dict(report.to_dict(), seed=cfg.seed, samples=cfg.samples), args.json)
        print(f"Wrote: {p}")

    print(f"nc_ok={report.ok}")
    return EXIT_OK if report.ok else EXIT_CHECKS_FAILED


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="Check the five NC conditions of a domain file")
    add_arguments(ap)
    args = ap.parse_args(glue_option_values(argv))
    return guarded(run, args)


if __name__ == "__main__":
    raise SystemExit(main())
