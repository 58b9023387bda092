"""``vqpe`` command-line entry point.

Every subcommand writes one CSV per table plus ``<command>_manifest.json``
into the output directory (``--out-dir``, else ``$VQPE_OUT_DIR``, else
``./vqpe_out``). ``--config file.json`` supplies parameters by their Python
names; flags given on the command line win.

Exit codes: 0 success, 2 invalid arguments, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import inspect
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import experiments
from .errors import (
    ContractViolationError,
    DegenerateProblemError,
    HamiltonianParseError,
    HermiticityError,
    InvalidArgumentError,
    NumericalFailureError,
    ResourceLimitError,
)

log = logging.getLogger("vqpe")

EXIT_OK, EXIT_ARGS, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _dt(text: str):
    return text if text == "perfect" else float(text)


def _add(p, flag, dest, type=float, nargs=None, help=None, action=None):
    kwargs = {"dest": dest, "help": help}
    if action:
        kwargs["action"] = action
    else:
        kwargs.update(type=type)
        if nargs:
            kwargs["nargs"] = nargs
    p.add_argument(flag, **kwargs)


def _seed_flags(p):
    _add(p, "--seed", "seed", int, help="base RNG seed (64-bit)")
    _add(p, "--n-seeds", "n_seeds", int, help="number of consecutive seeds starting at --seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vqpe", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help):
        p = sub.add_parser(name, help=help, argument_default=argparse.SUPPRESS)
        p.add_argument("--out-dir", dest="out_dir", type=Path, help="output directory")
        p.add_argument("--config", dest="config", type=Path, help="JSON file of parameters")
        p.add_argument("--plot", dest="plot", action="store_true",
                       help="also render PNG figures next to the CSV files")
        return p

    p = command("harmonic", "linear spectrum with a Boltzmann reference")
    _add(p, "--delta-e", "delta_e")
    _add(p, "--dimension", "dimension", int)
    _add(p, "--beta", "beta")
    _add(p, "--dt", "dt", _dt, help="time step or 'perfect'")
    _add(p, "--n-t-max", "n_t_max", int)
    _add(p, "--s-sv", "s_sv")
    _add(p, "--n-levels", "n_levels", int)
    p.add_argument("--formulation", dest="formulation", choices=["hermitian", "unitary"])

    p = command("noise", "noisy harmonic runs over epsilon and s_sv")
    _add(p, "--delta-e", "delta_e")
    _add(p, "--dimension", "dimension", int)
    _add(p, "--beta", "beta")
    _add(p, "--epsilon", "epsilon_list", float, "+")
    _add(p, "--s-sv", "s_sv_list", float, "+")
    _add(p, "--n-t-max", "n_t_max", int)
    _add(p, "--dt", "dt", _dt)
    p.add_argument("--noise-mode", dest="mode", choices=["element", "toeplitz"])
    _add(p, "--n-levels", "n_levels", int)
    _add(p, "--n-singular", "n_singular", int)
    _add(p, "--stride", "stride", int)
    _add(p, "--allow-low-threshold", "allow_low_threshold", action="store_true",
         help="permit s_sv less than two decades above epsilon")
    _seed_flags(p)

    p = command("condition", "condition number versus truncated ground error")
    _add(p, "--delta-e", "delta_e")
    _add(p, "--dimension", "dimension", int)
    _add(p, "--beta", "beta")
    _add(p, "--s-sv", "s_sv")
    _add(p, "--epsilon", "epsilon")
    p.add_argument("--noise-mode", dest="mode", choices=["element", "toeplitz"])
    _add(p, "--n-t-max", "n_t_max", int)
    _add(p, "--dt", "dt", _dt)
    _add(p, "--seed", "seed", int)

    p = command("tfim", "transverse-field Ising chain")
    _add(p, "--n-sites", "n_sites", int)
    _add(p, "--j", "j_coupling")
    _add(p, "--h-field", "h_field")
    _add(p, "--dt", "dt")
    _add(p, "--n-t-max", "n_t_max", int)
    _add(p, "--shots", "shots", int, help="Hadamard-test shots per register (omit for exact)")
    _add(p, "--s-sv", "s_sv")
    _add(p, "--reference", "reference", str, help="basis:K, boltzmann:BETA or product:A,B")
    p.add_argument("--propagation", dest="propagation", choices=["exact", "trotter"])
    p.add_argument("--formulation", dest="formulation", choices=["hermitian", "unitary"])
    _add(p, "--stride", "stride", int)
    _seed_flags(p)

    p = command("timestep", "time-step refinement and time to target accuracy")
    _add(p, "--hamiltonian", "hamiltonian", str, help="harmonic:dE,D | tfim:n,J,h | file.json")
    _add(p, "--reference", "reference", str)
    _add(p, "--dt0", "dt0")
    _add(p, "--s-sv", "s_sv")
    _add(p, "--n-t-budget", "n_t_budget", int)
    _add(p, "--max-rounds", "max_rounds", int)
    _add(p, "--s-sv-list", "s_sv_list", float, "+")
    _add(p, "--target", "target")
    _add(p, "--n-t-max", "n_t_max", int)
    _add(p, "--min-plateau", "min_plateau", int)

    p = command("qpe-compare", "VQPE versus phase-estimation accuracy and resources")
    _add(p, "--n-sites", "n_sites", int)
    _add(p, "--j", "j_coupling")
    _add(p, "--h-field", "h_field")
    _add(p, "--dt", "dt")
    _add(p, "--n-t-max", "n_t_max", int)
    _add(p, "--shots", "shots_list", int, "+")
    _add(p, "--shots-s-sv", "s_sv_list", float, "+", help="one s_sv per --shots value")
    _add(p, "--s-sv", "s_sv")
    _add(p, "--eps", "eps_sweep", float, "+")
    _add(p, "--reference", "reference", str)
    _add(p, "--seed", "seed", int)
    _add(p, "--stride", "stride", int)
    p.add_argument("--no-trotter", dest="trotter", action="store_false")

    p = command("support", "reference weights on the eigenstates")
    _add(p, "--hamiltonian", "hamiltonian", str)
    _add(p, "--reference", "reference", str)
    _add(p, "--threshold", "threshold")
    return parser


COMMANDS = {
    "harmonic": experiments.cmd_harmonic,
    "noise": experiments.cmd_noise,
    "condition": experiments.cmd_condition,
    "tfim": experiments.cmd_tfim,
    "timestep": experiments.cmd_timestep,
    "qpe-compare": experiments.cmd_qpe_compare,
    "support": experiments.cmd_support,
}

_META = {"command", "verbose", "out_dir", "config", "plot"}


def _merge_params(args: argparse.Namespace) -> dict:
    params = {}
    if getattr(args, "config", None) is not None:
        try:
            data = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(
                f"{args.config}: invalid JSON at line {exc.lineno}, column {exc.colno}"
            ) from exc
        if not isinstance(data, dict):
            raise InvalidArgumentError(f"{args.config}: config must be a JSON object")
        params.update(data)
    params.update({k: v for k, v in vars(args).items() if k not in _META})
    if "n_seeds" in params or (args.command in ("noise", "tfim") and "seed" in params):
        base = int(params.pop("seed", 0))
        params["seeds"] = list(range(base, base + int(params.pop("n_seeds", 1))))
    return params


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    started = time.monotonic()
    try:
        params = _merge_params(args)
        func = COMMANDS[args.command]
        log.info("running %s with %s", args.command, params)
        unknown = set(params) - set(inspect.signature(func).parameters)
        if unknown:
            raise InvalidArgumentError(
                f"unknown parameters for {args.command}: {', '.join(sorted(unknown))}"
            )
        result = func(**params)
        out_dir = getattr(args, "out_dir", None) or Path(os.environ.get("VQPE_OUT_DIR", "vqpe_out"))
        argv_list = [parser.prog, *(sys.argv[1:] if argv is None else argv)]
        written = experiments.write_result(result, out_dir, argv_list, getattr(args, "plot", False), started)
    except (
        InvalidArgumentError,
        HamiltonianParseError,
        HermiticityError,
        ContractViolationError,
        ResourceLimitError,
    ) as exc:
        print(f"vqpe: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (NumericalFailureError, DegenerateProblemError) as exc:
        print(f"vqpe: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"vqpe: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        print(path)
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))
