"""Command line interface.

    holosearch run --algorithm hps --scheme phase:256 --iterations 50000 --out runs/hps
    holosearch compare --algorithm ds hps --scheme phase:256 --iterations 50000 --out runs/cmp

Exit status: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from .harness import ConfigError, RunConfig, cli_compare, cli_run
from .search import ALGORITHMS

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", default="phase:256", help="device scheme, e.g. phase:256, phase:2, phase:continuous")
    p.add_argument("--iterations", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checkpoint", type=int, default=1000, help="iterations between trace records")
    p.add_argument("--t-coeff", type=float, default=None, help="SA temperature scale (default: initial error / 100)")
    p.add_argument("--t0", type=float, default=5.0, help="SA temperature decay rate")
    p.add_argument("--amplitude-image", default=None, help="PNG/PGM amplitude image (default: built-in test pattern)")
    p.add_argument("--phase-image", default=None, help="PNG/PGM phase image, value 1.0 = 2*pi")
    p.add_argument("--field-size", default="64", help="replay field size, N or NXxNY")
    p.add_argument("--layout", default="central-quadrant", choices=["central-quadrant", "full-field"])
    p.add_argument("--energy-norm", default="parseval-matched", choices=["parseval-matched", "unit-max"])
    p.add_argument("--recompute-interval", type=int, default=10_000,
                   help="full transform after this many applied pixel changes")
    p.add_argument("--timing", action="store_true",
                   help="record wall-clock elapsed_ns in the trace (makes the CSV non-reproducible)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="holosearch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p_run = sub.add_parser("run", help="run one search")
    p_run.add_argument("--algorithm", choices=ALGORITHMS, default="hps")
    _common(p_run)
    p_cmp = sub.add_parser("compare", help="paired runs on a shared target")
    p_cmp.add_argument("--algorithm", nargs="+", choices=ALGORITHMS, default=["ds", "hps"])
    _common(p_cmp)
    return parser


def _config(args, algorithm: str) -> RunConfig:
    return RunConfig(
        algorithm=algorithm,
        scheme=args.scheme,
        iterations=args.iterations,
        seed=args.seed,
        checkpoint_interval=args.checkpoint,
        t_coeff=args.t_coeff,
        t0=args.t0,
        amplitude_image=args.amplitude_image,
        phase_image=args.phase_image,
        field_size=args.field_size,
        layout=args.layout,
        energy_norm=args.energy_norm,
        out=args.out,
        record_timing=args.timing,
        recompute_interval=args.recompute_interval,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            result = cli_run(_config(args, args.algorithm))
            print(json.dumps(result.summary(), indent=2))
        else:
            base = _config(args, args.algorithm[0])
            configs = [replace(base, algorithm=a) for a in args.algorithm]
            report = cli_compare(configs, args.out)
            print(json.dumps(report, indent=2))
    except ConfigError as exc:
        print(f"holosearch: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"holosearch: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
