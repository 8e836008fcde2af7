from __future__ import annotations

import logging
import sys
from argparse import ArgumentParser, Namespace
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any

from colorama import Fore, Style  # type: ignore

from .coeffs import square_zero_extension
from .config import ConfigValueInvalid, ConfigValueMissing, config
from .exceptions import MalformedInput, PgmError
from .herr import (
    class_of_extension,
    cohomology_report,
    cup_pairing,
    lift_space_dim,
    obstruction_class,
)
from .pgmod import cartier_dual, extension_from_cocycle, tate_twist, tensor
from .rankone import identify_rank1, weight_rank2
from .schema import (
    CocycleData,
    LabelData,
    MatricesData,
    ModuleData,
    ReportData,
    WeightData,
    dumps,
)
from .suite import random_suite

COMMANDS = {
    "validate": 1,
    "cohomology": 1,
    "euler-check": 1,
    "dual": 1,
    "tensor": 2,
    "twist": 1,
    "ext-build": 3,
    "class-of": 1,
    "pair": 2,
    "identify": 1,
    "weight2": 1,
    "obstruct": 2,
    "lift-dim": 1,
    "suite": 0,
}


class SuiteFailed(PgmError):
    exit_code = 3


@dataclass
class RunConfig:
    command: str
    inputs: list[Path] = field(default_factory=list)
    precision: int | None = None
    seed: int = 0
    out: Path | None = None
    n: int = 1
    sub_rank: int = 1
    lift_dim: int = 1
    ideal_dim: int = 1
    p: int = 3
    q: int | None = None
    d_max: int = 2
    count: int = 10
    pairing: bool = False
    regress: bool = False
    representatives: bool = False


def _module(path: Path) -> Any:
    return ModuleData.load(path).to_module()


def _cocycle(path: Path) -> Any:
    return CocycleData.load(path).to_cocycle()


def run_command(run: RunConfig) -> ReportData:
    """Execute one command and build its report."""
    expected = COMMANDS.get(run.command)
    if expected is None:
        raise MalformedInput(f"Unknown command {run.command!r}")
    if len(run.inputs) != expected:
        raise MalformedInput(
            f"{run.command} takes {expected} input file(s),"
            f" got {len(run.inputs)}"
        )
    config.override(precision=run.precision)
    result: dict[str, Any]
    if run.command == "suite":
        suite = random_suite(
            run.seed,
            run.p,
            run.q or run.p,
            run.d_max,
            run.count,
            pairing=run.pairing,
            regress=run.regress,
        )
        result = suite.to_dict()
        if not suite.passed:
            raise SuiteFailed(
                f"Suite failed for cases {suite.failures}",
                ReportData(command=run.command, result=result),
            )
    elif run.command == "pair":
        alpha, beta = (_cocycle(path) for path in run.inputs)
        result = {"value": cup_pairing(alpha, beta).tolist()}
    elif run.command == "ext-build":
        m1, m2 = _module(run.inputs[0]), _module(run.inputs[1])
        c = _cocycle(run.inputs[2])
        e = extension_from_cocycle(m1, m2, c.a, c.b)
        result = ModuleData.from_module(e).to_dict()
    else:
        result = _module_command(run)
    return ReportData(command=run.command, result=result)


def _module_command(run: RunConfig) -> dict[str, Any]:
    m = _module(run.inputs[0])
    if run.command == "validate":
        m.validate()
        return {
            "valid": True,
            "rank": m.rank,
            "height": m.height,
            "shifts": list(m.lattice.shifts),
            "kernel_bound": m.lattice.kernel_bound,
        }
    if run.command in ("cohomology", "euler-check"):
        report = cohomology_report(m.validate(), pairing=run.pairing)
        result = report.to_dict()
        if run.command == "euler-check":
            result["h1_direct"] = len(report.representatives)
        if run.representatives:
            result["representatives"] = [
                CocycleData.from_cocycle(c).to_dict()
                for c in report.representatives
            ]
        return result
    if run.command == "dual":
        return ModuleData.from_module(cartier_dual(m)).to_dict()
    if run.command == "tensor":
        n = _module(run.inputs[1])
        return ModuleData.from_module(tensor(m, n)).to_dict()
    if run.command == "twist":
        return ModuleData.from_module(tate_twist(m, run.n)).to_dict()
    if run.command == "class-of":
        c = class_of_extension(m, run.sub_rank)
        return CocycleData.from_cocycle(c).to_dict()
    if run.command == "identify":
        return LabelData.from_label(identify_rank1(m.validate())).to_dict()
    if run.command == "weight2":
        return WeightData.from_weight(weight_rank2(m.validate())).to_dict()
    if run.command == "obstruct":
        ext = square_zero_extension(m.algebra, run.ideal_dim)
        phi, gamma, *_ = MatricesData.load(run.inputs[1]).to_matrices(
            ext.algebra
        )
        o = obstruction_class(m.validate(), ext, phi, gamma)
        return {
            "lifts_exist": o.lifts_exist,
            "h2_dim": o.h2_dim,
            "coords": o.coords,
        }
    return {"lift_space_dim": lift_space_dim(m.validate(), run.lift_dim)}


def _br(text: Any) -> str:
    return str(Style.BRIGHT + str(text) + Style.RESET_ALL)


class PgmApp:
    @cached_property
    def args_tuple(self) -> tuple[Namespace, list[str]]:
        def _parse_file_name(x: str) -> Path:
            if not (fp := Path(x).absolute()).is_file():
                raise MalformedInput(f"{fp} is not a file")
            return fp

        ap = ArgumentParser(
            description="Cohomology of (phi, Gamma)-modules mod p"
        )
        ap.add_argument(
            "command", choices=list(COMMANDS), help="Command to run"
        )
        ap.add_argument(
            "-i",
            "--input",
            dest="inputs",
            metavar="file",
            action="append",
            type=_parse_file_name,
            help="Input JSON file. Can be specified multiple times.",
        )
        ap.add_argument(
            "-o",
            "--out",
            dest="out",
            metavar="file",
            type=Path,
            help="Report file (default: standard output)",
        )
        ap.add_argument(
            "-c",
            "--config",
            dest="config",
            metavar="file",
            type=Path,
            help="YAML configuration file (default: built-in values)",
        )
        ap.add_argument(
            "--precision",
            type=int,
            metavar="N",
            help="Series window (default: \"precision\" config value)",
        )
        ap.add_argument("--seed", type=int, default=0, help="Random seed")
        ap.add_argument("--n", type=int, default=1, help="Twist exponent")
        ap.add_argument(
            "--sub-rank", dest="sub_rank", type=int, default=1,
            help="Rank of the declared sub-module",
        )
        ap.add_argument(
            "--lift-dim", dest="lift_dim", type=int, default=1,
            help="Dimension of the coefficient module for lift-dim",
        )
        ap.add_argument(
            "--ideal-dim", dest="ideal_dim", type=int, default=1,
            help="Dimension of the square-zero ideal for obstruct",
        )
        ap.add_argument("--p", type=int, default=3, help="Suite prime")
        ap.add_argument("--q", type=int, help="Suite field size")
        ap.add_argument("--d-max", dest="d_max", type=int, default=2)
        ap.add_argument("--count", type=int, default=10)
        ap.add_argument(
            "--pairing",
            action="store_true",
            help="Also check perfectness of the cup product pairing",
        )
        ap.add_argument(
            "--regress",
            action="store_true",
            help="Recompute with doubled windows",
        )
        ap.add_argument(
            "--representatives",
            action="store_true",
            help="Include H^1 representatives in cohomology reports",
        )
        ap.add_argument(
            "-v",
            "--verbose",
            action="store_true",
            help="Log engine progress to standard error",
        )
        return ap.parse_known_args()

    @cached_property
    def args(self) -> Namespace:
        return self.args_tuple[0]

    @cached_property
    def run_config(self) -> RunConfig:
        args = self.args
        return RunConfig(
            command=args.command,
            inputs=list(args.inputs or []),
            precision=args.precision,
            seed=args.seed,
            out=args.out,
            n=args.n,
            sub_rank=args.sub_rank,
            lift_dim=args.lift_dim,
            ideal_dim=args.ideal_dim,
            p=args.p,
            q=args.q,
            d_max=args.d_max,
            count=args.count,
            pairing=args.pairing,
            regress=args.regress,
            representatives=args.representatives,
        )

    def __call__(self) -> None:
        sys.exit(self.run())

    def run(self) -> int:
        try:
            if self.args.verbose:
                logging.basicConfig(
                    level=logging.DEBUG, format="%(name)s: %(message)s"
                )
            config.load(self.args.config)
            run = self.run_config
            config.override(precision=run.precision)
            self.print_config(run)
            report = run_command(run)
        except SuiteFailed as e:
            self.write(e.args[1])
            return self.fail(e)
        except PgmError as e:
            return self.fail(e)
        except (ConfigValueMissing, ConfigValueInvalid) as e:
            return self.fail(MalformedInput(str(e)))
        self.write(report)
        return 0

    def write(self, report: ReportData) -> None:
        text = dumps(report.to_dict())
        if self.run_config.out:
            self.run_config.out.write_text(text)
        else:
            sys.stdout.write(text)

    @staticmethod
    def fail(e: PgmError) -> int:
        print(
            Fore.RED + _br(">>> ") + f"{type(e).__name__}: " + _br(e.args[0]),
            file=sys.stderr,
        )
        return e.exit_code

    def print_config(self, run: RunConfig) -> None:
        align = 12
        print(
            Fore.MAGENTA
            + _br(">>> ")
            + "Command "
            + _br(run.command)
            + " ("
            + _br(config.conf_file or "default configuration")
            + "):",
            file=sys.stderr,
        )
        for name in ("precision", "h1_budget"):
            print(
                "   ",
                f"{name + ':': >{align}}",
                _br(getattr(config, name)),
                file=sys.stderr,
            )
        for path in run.inputs:
            print("   ", f"{'input:': >{align}}", _br(path), file=sys.stderr)
