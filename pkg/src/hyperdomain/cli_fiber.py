from __future__ import annotations

import argparse

from hyperdomain.cli_common import EXIT_OK, add_common, add_domain_file, glue_option_values, guarded, parse_ints, resolve_seed
from hyperdomain.fibers import FiberConfig, fiber_report
from hyperdomain.files import read_domain, write_json
from hyperdomain.manifold import build_system


def add_system_arguments(ap: argparse.ArgumentParser) -> None:
    add_domain_file(ap)
    ap.add_argument("--d", type=parse_ints, default=None, help="Sphere block sizes d_j (default 2 each)")


def add_arguments(ap: argparse.ArgumentParser) -> None:
    add_system_arguments(ap)
    ap.add_argument("--t", type=float, required=True, help="Value of f whose fiber is described")
    ap.add_argument("--k", type=int, default=200, help="Number of fiber samples")
    ap.add_argument("--eps", type=float, default=None, help="Neighbourhood radius (default 3x median NN distance)")
    ap.add_argument("--R", type=float, default=None, help="Cut for unbounded slices (default 10 * span)")
    add_common(ap)


def run(args: argparse.Namespace) -> int:
    s = build_system(read_domain(args.file), args.d)
    cfg = FiberConfig(k=args.k, eps=args.eps, R=args.R, seed=resolve_seed(args))
    rep = fiber_report(s, args.t, cfg)

    print(f"t={rep.t:g} nonempty={rep.nonempty} bounded={rep.bounded} single_point={rep.single_point}")
    if rep.nonempty:
        print(f"components={rep.sampled_components} (k={rep.sample_count}, eps={rep.epsilon:.4g}) fiber_dim={rep.fiber_dim}")
        print(rep.model)
    if args.json:
        p = write_json(dict(rep.to_dict(), blocks=list(s.blocks), seed=cfg.seed), args.json)
        print(f"Wrote: {p}")
    return EXIT_OK


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="Describe the fiber of f over one value")
    add_arguments(ap)
    args = ap.parse_args(glue_option_values(argv))
    return guarded(run, args)


if __name__ == "__main__":
    raise SystemExit(main())
