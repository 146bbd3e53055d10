"""``qdephase`` command-line interface.

    qdephase run CONFIG [--out DIR] [--format csv|json|both]
    qdephase preset NAME [--out DIR] [--format ...] [--dump]
    qdephase list-presets

Exit status: 0 on success, 2 for configuration errors, 3 for parameter-domain
errors raised by the physics modules.
"""

import argparse
import sys
from pathlib import Path

from qdephase import __version__
from qdephase.config import FORMATS, load_config
from qdephase.errors import ConfigError, DomainError
from qdephase.experiments import run_experiment
from qdephase.presets import PRESETS, preset, preset_names, preset_text
from qdephase.tables import write_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3


def run_config(config, out=None, fmt=None):
    """Run every experiment of ``config`` and write its tables.

    Files are named ``<experiment>_<table>.<ext>``.  Returns the written paths.
    """
    directory = Path(out or config.output_dir)
    fmt = fmt or config.output_format
    paths = []
    for exp in config.experiments:
        for table in run_experiment(exp):
            paths += write_table(table, directory, fmt, prefix=f"{exp.name}_")
    return paths


def _parser():
    ap = argparse.ArgumentParser(prog="qdephase", description="Engineered-dephasing qubit experiments.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the experiments of a config file")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (overrides [output] dir)")
    run.add_argument("--format", choices=FORMATS, help="output format (overrides [output] format)")

    pre = sub.add_parser("preset", help="run a figure preset")
    pre.add_argument("name")
    pre.add_argument("--out", help="output directory (default results/<name>)")
    pre.add_argument("--format", choices=FORMATS)
    pre.add_argument("--dump", action="store_true", help="print the preset config and exit")

    sub.add_parser("list-presets", help="list preset names")
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "list-presets":
            for name in preset_names():
                print(f"{name:8s} {PRESETS[name][0]}")
            return EXIT_OK
        if args.command == "preset":
            if args.dump:
                sys.stdout.write(preset_text(args.name))
                return EXIT_OK
            config = preset(args.name)
            out = args.out or str(Path(config.output_dir) / args.name)
        else:
            config = load_config(args.config)
            out = args.out
        for path in run_config(config, out, args.format):
            print(path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
