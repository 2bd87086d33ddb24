"""Command-line entry point: ``catlab <stage> [options]``.

Exit codes: 0 success, 2 validation or parse error, 3 no herald,
4 reconstruction did not converge, 5 file I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path

from . import pipeline
from .errors import CatlabError, NoHeraldError
from .pipeline import ExperimentConfig, StageError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NO_HERALD = 3
EXIT_NOT_CONVERGED = 4
EXIT_IO = 5


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="INI file with ExperimentConfig values")
    group = p.add_argument_group("config overrides")
    for f in fields(ExperimentConfig):
        if f.name == "seed":
            continue
        kind = {"bool": _bool, "int": int}.get(f.type if isinstance(f.type, str) else f.type.__name__, float)
        group.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name, type=kind, default=None,
                           help=f.metadata["help"])
    p.add_argument("--seed", type=int, default=None, help="master seed (unsigned 64-bit)")


def _add_common(p: argparse.ArgumentParser) -> None:
    _add_config_args(p)
    p.add_argument("--out", type=Path, default=Path("run"), help="output directory (default: run)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catlab", description="Heralded odd-cat state pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write heralded density matrices for modes c and d")
    _add_common(p)

    p = sub.add_parser("sample", help="draw homodyne samples from a state file")
    _add_common(p)
    p.add_argument("--mode", choices=("c", "d"), required=True)
    p.add_argument("--state", type=Path, help="state file (default: <out>/state_<mode>.dm)")

    p = sub.add_parser("reconstruct", help="maximum-likelihood reconstruction of a dataset")
    _add_common(p)
    p.add_argument("--mode", choices=("c", "d"))
    p.add_argument("--data", type=Path, help="dataset file (default: <out>/data_<mode>.csv)")

    p = sub.add_parser("analyze", help="Wigner function, purity and cat fits of a density matrix")
    _add_common(p)
    p.add_argument("--mode", choices=("c", "d"))
    p.add_argument("--matrix", type=Path, help="density file (default: <out>/recon_<mode>.dm)")
    p.add_argument("--axis", choices=("x", "p"), help="report this cat axis (default: best)")

    p = sub.add_parser("end2end", help="simulate, sample, reconstruct and analyze both modes")
    _add_common(p)

    p = sub.add_parser("fcc", help="four-component cat synthesis from two state files")
    _add_common(p)
    p.add_argument("--state-c", type=Path, help="default: <out>/state_c.dm")
    p.add_argument("--state-d", type=Path, help="default: <out>/state_d.dm")
    p.add_argument("--projected-n", type=int, default=3)

    p = sub.add_parser("config", help="print the effective configuration as INI")
    _add_config_args(p)
    p.add_argument("--defaults", action="store_true", help="print the built-in defaults, ignoring other flags")
    return parser


def _config(args) -> ExperimentConfig:
    overrides = {f.name: getattr(args, f.name, None) for f in fields(ExperimentConfig)}
    return ExperimentConfig.load(args.config, **overrides)


def _need_mode(args, given) -> str:
    if args.mode:
        return args.mode
    if given is None:
        raise CatlabError("give --mode or an explicit input file")
    return None


def run(args) -> int:
    if args.command == "config":
        cfg = ExperimentConfig() if args.defaults else _config(args)
        sys.stdout.write(cfg.to_ini())
        return EXIT_OK

    cfg = _config(args)
    out = args.out
    if args.command == "simulate":
        for path in pipeline.cmd_simulate(cfg, out).values():
            print(path)
    elif args.command == "sample":
        state = args.state or pipeline.state_path(out, args.mode)
        print(pipeline.cmd_sample(cfg, state, args.mode, out))
    elif args.command == "reconstruct":
        mode = _need_mode(args, args.data)
        data = args.data or out / f"data_{mode}.csv"
        res = pipeline.cmd_reconstruct(cfg, data, out, mode)
        print(res.matrix)
        if not res.converged:
            print(f"reconstruction did not converge; see {res.diagnostics}", file=sys.stderr)
            return EXIT_NOT_CONVERGED
    elif args.command == "analyze":
        mode = _need_mode(args, args.matrix)
        matrix = args.matrix or out / f"recon_{mode}.dm"
        print(pipeline.cmd_analyze(cfg, matrix, out, args.axis, mode))
    elif args.command == "end2end":
        res = pipeline.cmd_end2end(cfg, out)
        summary = {m: {k: r[k] for k in ("best_axis", "alpha_star", "fidelity_star", "wigner_origin")}
                   for m, r in res.reports.items()}
        print(json.dumps(summary, indent=2, sort_keys=True))
        if not res.converged:
            print("a reconstruction did not converge", file=sys.stderr)
            return EXIT_NOT_CONVERGED
    elif args.command == "fcc":
        sc = args.state_c or pipeline.state_path(out, "c")
        sd = args.state_d or pipeline.state_path(out, "d")
        print(pipeline.cmd_fcc(cfg, sc, sd, args.projected_n, out))
    return EXIT_OK


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, StageError):
        exc = exc.error
    if isinstance(exc, NoHeraldError):
        return EXIT_NO_HERALD
    if isinstance(exc, (OSError, UnicodeDecodeError)):
        return EXIT_IO
    return EXIT_VALIDATION


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except (CatlabError, OSError, UnicodeDecodeError) as exc:
        print(f"catlab: error: {exc}", file=sys.stderr)
        return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
