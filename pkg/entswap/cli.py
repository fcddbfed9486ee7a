import argparse
import json
import math
import sys
from argparse import Namespace
from typing import IO, Any, List, NamedTuple, Optional

import entswap
from entswap.config import Config, get_default_config
from entswap.executors.local import LocalExecutor
from entswap.logging import log_levels, logger
from entswap.protocol import (
    MAX_SEED,
    PairSpec,
    check_seed,
    derive_seed,
    run_exact,
    run_sampled,
)
from entswap.report import (
    BRANCH_COLUMNS,
    SAMPLED_COLUMN,
    SAMPLE_COLUMNS,
    SWEEP_COLUMNS,
    branch_rows,
    report_to_dict,
    sweep_row,
    tally_to_dict,
    write_csv,
)
from entswap.utils import parse_grid
from entswap.verify import run_verify

# Constants.
ENTSWAP_DESCRIPTION = """\
entswap :: version {version}

Entanglement swapping with local filtering: exact probability trees,
seeded sampling, parameter sweeps and self-verification.
"""

# Exit codes.
EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

MODES = ["exact", "sample"]
FORMATS = ["json", "csv"]

# Valid range of the smaller Schmidt weights: (0, 0.5].
MIN_WEIGHT = 0.0
MAX_WEIGHT = 0.5


class EntswapClientError(Exception):
    pass


class ArgFormatter(argparse.ArgumentDefaultsHelpFormatter, argparse.RawDescriptionHelpFormatter):
    """
    An argument formatter that shows default values and does not reflow description strings.
    """

    pass


class RunConfig(NamedTuple):
    beta2: float
    b2: float
    phase_beta: float = 0.0
    phase_b: float = 0.0
    mode: str = "exact"
    trials: int = 0
    seed: int = 0
    format: str = "json"
    output: Optional[str] = None

    @property
    def pairs(self):
        return (
            PairSpec.from_weight(self.beta2, self.phase_beta),
            PairSpec.from_weight(self.b2, self.phase_b),
        )


def check_weight(name: str, value: float) -> float:
    if not (math.isfinite(value) and MIN_WEIGHT < value <= MAX_WEIGHT):
        raise EntswapClientError(
            f"--{name} {value} is outside the valid range ({MIN_WEIGHT}, {MAX_WEIGHT}]."
        )
    return value


def check_seed_arg(seed: int) -> int:
    try:
        return check_seed(seed)
    except ValueError:
        raise EntswapClientError(f"--seed {seed} is outside the valid range [0, {MAX_SEED}].")


def check_max_workers(max_workers: Optional[int]) -> None:
    if max_workers is not None and max_workers < 1:
        raise EntswapClientError(f"--max-workers must be >= 1, not {max_workers}.")


def make_run_config(args: Namespace) -> RunConfig:
    """
    Validate `run` arguments into a RunConfig.
    """
    beta2 = check_weight("beta2", args.beta2)
    b2 = check_weight("b2", args.b2 if args.b2 is not None else beta2)
    for name in ("phase_beta", "phase_b"):
        if not math.isfinite(getattr(args, name)):
            raise EntswapClientError(f"--{name.replace('_', '-')} must be a finite angle.")
    if args.mode == "sample" and args.trials < 1:
        raise EntswapClientError(f"--trials must be >= 1 in sample mode, not {args.trials}.")

    return RunConfig(
        beta2=beta2,
        b2=b2,
        phase_beta=args.phase_beta,
        phase_b=args.phase_b,
        mode=args.mode,
        trials=args.trials,
        seed=check_seed_arg(args.seed),
        format=args.format,
        output=args.output,
    )


def parse_weight_grid(name: str, text: str) -> List[float]:
    try:
        values = parse_grid(text)
    except ValueError as error:
        raise EntswapClientError(f"--{name}: {error}")
    for value in values:
        check_weight(name, value)
    return values


class SweepPoint(NamedTuple):
    index: int
    beta2: float
    b2: float
    trials: Optional[int]
    seed: int


def run_sweep_point(point: SweepPoint) -> List[str]:
    """
    Compute one sweep CSV row; sampling uses a sub-seed derived from the grid index.
    """
    pair12, pair34 = PairSpec.from_weight(point.beta2), PairSpec.from_weight(point.b2)
    report = run_exact(pair12, pair34)
    sampled = None
    if point.trials:
        tally = run_sampled(
            pair12,
            pair34,
            trials=point.trials,
            seed=derive_seed(point.seed, point.index),
            report=report,
        )
        sampled = tally.success_frequency
    return sweep_row(report, sampled)


class EntswapClient:
    """
    Command-line (CLI) client for entswap.
    """

    def __init__(self, stdout: IO = sys.stdout, stderr: IO = sys.stderr):
        self.stdout: IO = stdout
        self.stderr: IO = stderr

    def execute(self, argv: Optional[List[str]] = None) -> Any:
        """
        Execute a command from the command line.

        Returns the exit code. Usage errors raise EntswapClientError.
        """
        if argv is None:
            argv = sys.argv

        parser = self.get_command_parser()
        args = parser.parse_args(argv[1:])

        if args.log_level:
            logger.setLevel(log_levels[args.log_level])

        return args.func(args)

    def display(self, *messages: Any, newline: bool = True) -> None:
        """
        Write text to standard output.
        """
        try:
            text = " ".join(map(str, messages))
            self.stdout.write(text)
            if newline:
                self.stdout.write("\n")

        except BrokenPipeError:
            # Gracefully exit, when stdout is closed.
            sys.stderr.close()
            sys.exit()

    def open_output(self, path: Optional[str]) -> IO:
        if not path:
            return self.stdout
        try:
            return open(path, "w", newline="")
        except OSError as error:
            raise EntswapClientError(f"Cannot open output {path}: {error.strerror}")

    def get_config(self, args: Namespace) -> Config:
        return get_default_config(
            {
                "executors.default": {
                    "mode": getattr(args, "exec_mode", None),
                    "max_workers": getattr(args, "max_workers", None),
                },
                "verify": {"seed": getattr(args, "seed", None)},
            }
        )

    def get_command_parser(self) -> argparse.ArgumentParser:
        """
        Returns the command line parser.
        """
        parser = argparse.ArgumentParser(
            prog="entswap",
            formatter_class=ArgFormatter,
            description=ENTSWAP_DESCRIPTION.format(version=entswap.__version__),
        )
        parser.add_argument(
            "-V", "--version", action="version", version=f"entswap {entswap.__version__}"
        )
        parser.add_argument(
            "--log-level",
            default="INFO",
            choices=log_levels.keys(),
            help="Set entswap logging level.",
        )
        parser.set_defaults(func=self.help_command, parser=parser)
        subparsers = parser.add_subparsers()

        # Help command.
        help_parser = subparsers.add_parser("help", help="Show help information.")
        help_parser.set_defaults(func=self.help_command, parser=parser)

        # Run command.
        run_parser = subparsers.add_parser(
            "run", formatter_class=ArgFormatter, help="Run the protocol for one pair of inputs."
        )
        run_parser.add_argument(
            "--beta2", type=float, required=True, help="Smaller Schmidt weight of pair (1, 2)."
        )
        run_parser.add_argument(
            "--b2", type=float, help="Smaller Schmidt weight of pair (3, 4) (default: beta2)."
        )
        run_parser.add_argument(
            "--phase-beta", type=float, default=0.0, help="Phase of beta in radians."
        )
        run_parser.add_argument("--phase-b", type=float, default=0.0, help="Phase of b in radians.")
        run_parser.add_argument("--mode", choices=MODES, default="exact", help="Run mode.")
        run_parser.add_argument(
            "--trials", type=int, default=100000, help="Number of trials in sample mode."
        )
        run_parser.add_argument("--seed", type=int, default=0, help="Sampling seed.")
        run_parser.add_argument("--format", choices=FORMATS, default="json", help="Report format.")
        run_parser.add_argument("-o", "--output", help="Output path (default: stdout).")
        run_parser.set_defaults(func=self.run_command)

        # Sweep command.
        sweep_parser = subparsers.add_parser(
            "sweep", formatter_class=ArgFormatter, help="Tabulate the protocol over a grid."
        )
        sweep_parser.add_argument(
            "--beta2", required=True, help="Grid of beta2 values, start:stop:step or a number."
        )
        sweep_parser.add_argument(
            "--b2", help="Grid of b2 values, start:stop:step or a number (default: beta2 grid)."
        )
        sweep_parser.add_argument("--seed", type=int, default=0, help="Master sampling seed.")
        sweep_parser.add_argument(
            "--trials", type=int, help="Also sample each grid point with this many trials."
        )
        sweep_parser.add_argument("-o", "--output", help="Output path (default: stdout).")
        self.add_executor_arguments(sweep_parser)
        sweep_parser.set_defaults(func=self.sweep_command)

        # Verify command.
        verify_parser = subparsers.add_parser(
            "verify", formatter_class=ArgFormatter, help="Run the invariant suites."
        )
        verify_parser.add_argument(
            "--trials", type=int, help="Trials per sampling check (default: from config)."
        )
        verify_parser.add_argument("--seed", type=int, default=0, help="Master seed.")
        self.add_executor_arguments(verify_parser)
        verify_parser.set_defaults(func=self.verify_command)

        return parser

    def add_executor_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument(
            "--exec-mode",
            choices=LocalExecutor.MODES,
            help="Run grid points on threads or processes (default: from config).",
        )
        parser.add_argument("--max-workers", type=int, help="Number of parallel workers.")

    def help_command(self, args: Namespace) -> int:
        """
        Show help information.
        """
        args.parser.print_help(self.stdout)
        return EXIT_OK

    def run_command(self, args: Namespace) -> int:
        """
        Run the protocol once and emit its report.
        """
        config = make_run_config(args)
        pair12, pair34 = config.pairs
        report = run_exact(pair12, pair34)

        tally = None
        if config.mode == "sample":
            tally = run_sampled(
                pair12, pair34, trials=config.trials, seed=config.seed, report=report
            )

        out = self.open_output(config.output)
        try:
            if config.format == "json":
                document = report_to_dict(report)
                if tally is not None:
                    document["tally"] = tally_to_dict(tally)
                out.write(json.dumps(document, indent=2))
                out.write("\n")
            else:
                header = BRANCH_COLUMNS + (SAMPLE_COLUMNS if tally is not None else [])
                write_csv(out, header, branch_rows(report, tally))
        finally:
            if out is not self.stdout:
                out.close()
        return EXIT_OK

    def sweep_command(self, args: Namespace) -> int:
        """
        Tabulate exact (and optionally sampled) results over a grid as CSV.
        """
        beta2_values = parse_weight_grid("beta2", args.beta2)
        b2_values = parse_weight_grid("b2", args.b2) if args.b2 else beta2_values
        if args.trials is not None and args.trials < 1:
            raise EntswapClientError(f"--trials must be >= 1, not {args.trials}.")
        seed = check_seed_arg(args.seed)
        check_max_workers(args.max_workers)

        points = [
            SweepPoint(index, beta2, b2, args.trials, seed)
            for index, (beta2, b2) in enumerate(
                (beta2, b2) for beta2 in beta2_values for b2 in b2_values
            )
        ]
        logger.info(f"Sweeping {len(points)} grid points...")

        config = self.get_config(args)
        with LocalExecutor("default", config["executors"]["default"]) as executor:
            rows = executor.map(run_sweep_point, points)

        header = SWEEP_COLUMNS + ([SAMPLED_COLUMN] if args.trials else [])
        out = self.open_output(args.output)
        try:
            write_csv(out, header, rows)
        finally:
            if out is not self.stdout:
                out.close()
        return EXIT_OK

    def verify_command(self, args: Namespace) -> int:
        """
        Run every invariant suite and print one PASS/FAIL line per suite.
        """
        if args.trials is not None and args.trials < 1:
            raise EntswapClientError(f"--trials must be >= 1, not {args.trials}.")
        check_seed_arg(args.seed)
        check_max_workers(args.max_workers)

        results = run_verify(self.get_config(args), trials=args.trials)
        for result in results:
            self.display(result.format())

        failures = [result for result in results if not result.passed]
        if failures:
            self.display(f"FAILED: {failures[0].name}")
            return EXIT_VERIFY_FAILED
        self.display("ALL PASS")
        return EXIT_OK


def main(argv: Optional[List[str]] = None, client: Optional[EntswapClient] = None) -> int:
    """
    Run the client and map usage errors to exit code 2.
    """
    client = client or EntswapClient()
    try:
        return client.execute(argv)
    except EntswapClientError as error:
        client.stderr.write(f"entswap: error: {error}\n")
        return EXIT_USAGE
