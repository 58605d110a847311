from __future__ import annotations

import argparse

from hyperdomain import cli_build, cli_check, cli_export, cli_fiber, cli_image, cli_plot, cli_singular
from hyperdomain.cli_common import glue_option_values, guarded

COMMANDS = {
    "build": (cli_build, "Build a domain file from t and labels"),
    "check": (cli_check, "Check the NC conditions"),
    "fiber": (cli_fiber, "Describe a fiber of f"),
    "singular": (cli_singular, "Singular values of f"),
    "image": (cli_image, "Image of f"),
    "export-system": (cli_export, "Export the polynomial system"),
    "plot": (cli_plot, "Render a factor domain as SVG"),
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="hyperdomain")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (module, help_text) in COMMANDS.items():
        module.add_arguments(sub.add_parser(name, help=help_text, description=help_text))
    args = ap.parse_args(glue_option_values(argv))
    return guarded(COMMANDS[args.command][0].run, args)


if __name__ == "__main__":
    raise SystemExit(main())
