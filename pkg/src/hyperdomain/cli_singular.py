from __future__ import annotations

import argparse

import pandas as pd

from hyperdomain.cli_common import EXIT_CHECKS_FAILED, EXIT_OK, add_common, glue_option_values, guarded, resolve_seed
from hyperdomain.cli_fiber import add_system_arguments
from hyperdomain.fibers import SingularConfig, singular_values
from hyperdomain.files import read_domain, write_json
from hyperdomain.manifold import build_system


def add_arguments(ap: argparse.ArgumentParser) -> None:
    add_system_arguments(ap)
    ap.add_argument("--samples", type=int, default=200, help="Random points for the off-corner checks")
    add_common(ap)


def run(args: argparse.Namespace) -> int:
    s = build_system(read_domain(args.file), args.d)
    cfg = SingularConfig(samples=args.samples, seed=resolve_seed(args))
    rep = singular_values(s, cfg)

    print(f"singular values of f: {rep.predicted_values}")
    rows = [dict(x1=c.x1, factor=c.factor, pair=list(c.pair), verified=c.verified) for c in rep.corners]
    print(pd.DataFrame(rows, columns=["x1", "factor", "pair", "verified"]).to_string(index=False))
    print(f"off_corner_clean={rep.off_corner_clean:.3f} boundary_clean={rep.boundary_clean:.3f}")
    if args.json:
        p = write_json(dict(rep.to_dict(), blocks=list(s.blocks), seed=cfg.seed), args.json)
        print(f"Wrote: {p}")
    return EXIT_OK if rep.ok else EXIT_CHECKS_FAILED


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="Predict and verify the singular values of f")
    add_arguments(ap)
    args = ap.parse_args(glue_option_values(argv))
    return guarded(run, args)


if __name__ == "__main__":
    raise SystemExit(main())
