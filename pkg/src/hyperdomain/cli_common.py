from __future__ import annotations

import argparse
import logging
import re
import sys
from typing import Callable, List, Sequence

from hyperdomain.config import load_settings

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_USAGE = 2

_NEGATIVE_VALUE = re.compile(r"^-[0-9.]")


def glue_option_values(argv: Sequence[str] | None) -> List[str]:
    """Turn `--t -1,1` into `--t=-1,1` so argparse does not read -1,1 as a flag."""
    argv = list(sys.argv[1:] if argv is None else argv)
    out: List[str] = []
    for tok in argv:
        prev = out[-1] if out else ""
        if prev.startswith("--") and "=" not in prev and _NEGATIVE_VALUE.match(tok):
            out[-1] = f"{prev}={tok}"
        else:
            out.append(tok)
    return out


def parse_floats(text: str) -> List[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("expected at least one number")
    return vals


def parse_ints(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def parse_window(text: str) -> List[float]:
    vals = parse_floats(text)
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(f"window needs xmin,xmax,ymin,ymax, got {text!r}")
    return vals


def add_domain_file(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("file", help="domain.json written by `hyperdomain build` (or a system export)")


def add_common(ap: argparse.ArgumentParser, seed: bool = True, json_out: bool = True) -> None:
    if seed:
        ap.add_argument("--seed", type=int, default=None, help="RNG seed (default: HYPERDOMAIN_SEED or 0)")
    if json_out:
        ap.add_argument("--json", default="", help="Write the machine-readable report to this path")
    ap.add_argument("--verbose", action="store_true", help="Log progress to stderr")


def resolve_seed(args: argparse.Namespace) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    return load_settings().seed


def guarded(run: Callable[[argparse.Namespace], int], args: argparse.Namespace) -> int:
    """Run a command body, mapping input and validation errors to exit code 2."""
    if getattr(args, "verbose", False):
        logging.basicConfig(level=logging.DEBUG, format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except (ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
