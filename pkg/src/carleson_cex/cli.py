"""Command-line interface.

Subcommands
-----------
``spectrum``    sparse Taylor spectrum of ``phi`` as JSON
``intensity``   dyadic Carleson intensity of ``phi`` as JSON
``embedding``   embedding form by both routes and the norm ratio as JSON
``experiment``  growth table across dimensions as CSV (or JSON)
``verify``      numerical check suites as JSON

Exit status is 0 on success, 1 when a verification verdict fails or a
computation does not reach its tolerance, and 2 on invalid input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .config import RunConfig, load_config
from .construction import phi_spectrum
from .embedding import ratio_lower_bound
from .errors import CarlesonError, DomainError, ExperimentAborted, PreconditionError
from .measure import carleson_intensity
from .verify import (growth_checks, growth_experiment, verify_analysis_lemmas,
                     verify_construction_lemmas)
from .wavelet import Ramp, WaveletProfile

__all__ = ["main", "run_cli", "build_parser", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1
_EXACT_INT = 1 << 53

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports errors by exception instead of exiting."""

    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}\n")


def _dims(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid dimension list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--out", help="output path (default: standard output)")
    common.add_argument("--format", choices=("json", "csv"), help="output format")
    common.add_argument("--seed", type=int, help="seed of sampled arcs and vectors")
    common.add_argument("--threads", type=int, help="worker threads (1 gives byte-identical output)")
    common.add_argument("--ramp", choices=[r.value for r in Ramp], help="profile ramp")
    common.add_argument("--quiet", action="store_true", help="print only the output path")

    parser = _Parser(prog="carleson-cex", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("spectrum", parents=[common], help="export the Taylor spectrum of phi")
    p.add_argument("--dim", type=int)

    p = sub.add_parser("intensity", parents=[common], help="dyadic Carleson intensity")
    p.add_argument("--dim", type=int)
    p.add_argument("--max-rank", type=int)

    p = sub.add_parser("embedding", parents=[common], help="embedding form and norm ratio")
    p.add_argument("--dim", type=int)
    p.add_argument("--max-rank", type=int)

    p = sub.add_parser("experiment", parents=[common], help="growth table across dimensions")
    p.add_argument("--dims", type=_dims)
    p.add_argument("--max-rank", type=int)

    p = sub.add_parser("verify", parents=[common], help="numerical check suites")
    p.add_argument("--suite", choices=("construction", "analysis", "growth"), required=True)
    p.add_argument("--dim", type=int)
    p.add_argument("--dims", type=_dims)
    p.add_argument("--max-rank", type=int)
    p.add_argument("--max-rd", type=int)
    return parser


# ----------------------------------------------------------------------
# serialization


def _clean(obj):
    """JSON-ready copy: exact large integers as strings, non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int) or hasattr(obj, "__index__"):
        value = int(obj)
        return str(value) if abs(value) >= _EXACT_INT else value
    if isinstance(obj, float) or hasattr(obj, "__float__"):
        value = float(obj)
        return value if math.isfinite(value) else str(value)
    return obj


def _document(command: str, parameters: dict, body: dict) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "parameters": parameters}
    doc.update(body)
    return _clean(doc)


def _emit(text: str, cfg: RunConfig, quiet: bool, summary: list[str]) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
        return
    path = Path(cfg.out)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    if not quiet:
        for line in summary:
            print(line)
    print(str(path))


def _json_text(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


# ----------------------------------------------------------------------
# subcommands


def _single_dim(args, cfg: RunConfig) -> int:
    if args.dim is None:
        return cfg.dims[0]
    cfg.updated(dims=(args.dim,))  # validates the range
    return args.dim


def _profile(cfg: RunConfig) -> WaveletProfile:
    return WaveletProfile(cfg.ramp)


def _cmd_spectrum(args, cfg):
    N = _single_dim(args, cfg)
    spec = phi_spectrum(N, _profile(cfg))
    doc = _document("spectrum", {"N": N, "ramp": cfg.ramp.value}, spec.to_dict())
    _emit(_json_text(doc), cfg, args.quiet, [f"spectrum N={N}: {len(spec)} entries"])
    return EXIT_OK


def _intensity_body(N: int, res) -> dict:
    body = {"N": N}
    body.update(res.to_dict())
    return body


def _cmd_intensity(args, cfg):
    N = _single_dim(args, cfg)
    res = carleson_intensity(phi_spectrum(N, _profile(cfg)), cfg.max_rank,
                             seed=cfg.seed, threads=cfg.threads)
    params = {"N": N, "max_rank": cfg.max_rank, "ramp": cfg.ramp.value, "seed": cfg.seed}
    doc = _document("intensity", params, _intensity_body(N, res))
    _emit(_json_text(doc), cfg, args.quiet,
          [f"intensity N={N}: {res.value:.6g} at {res.witness}"])
    return EXIT_OK


def _cmd_embedding(args, cfg):
    N = _single_dim(args, cfg)
    res = ratio_lower_bound(N, cfg.max_rank, profile=_profile(cfg),
                            seed=cfg.seed, threads=cfg.threads)
    params = {"N": N, "max_rank": cfg.max_rank, "ramp": cfg.ramp.value, "seed": cfg.seed}
    doc = _document("embedding", params, res.to_dict())
    _emit(_json_text(doc), cfg, args.quiet,
          [f"embedding N={N}: value {res.value_spectral:.6g}, ratio {res.ratio_lower_bound:.6g}"])
    return EXIT_OK


def _growth_text(report, cfg: RunConfig, command: str, params: dict, extra=None) -> str:
    if (cfg.format or "csv") == "csv" and command == "experiment":
        return report.to_csv()
    body = report.to_dict()
    if extra:
        body.update(extra)
    return _json_text(_document(command, params, body))


def _growth_dims(args, cfg: RunConfig) -> tuple:
    dims = tuple(args.dims) if args.dims is not None else cfg.dims
    return cfg.updated(dims=dims).dims


def _cmd_experiment(args, cfg):
    dims = _growth_dims(args, cfg)
    params = {"dims": list(dims), "max_rank": cfg.max_rank, "ramp": cfg.ramp.value,
              "seed": cfg.seed}
    try:
        report = growth_experiment(dims, cfg.max_rank, profile=_profile(cfg),
                                   seed=cfg.seed, threads=cfg.threads)
    except ExperimentAborted as exc:
        _emit(_growth_text(exc.partial, cfg, "experiment", params), cfg, args.quiet, [])
        raise
    _emit(_growth_text(report, cfg, "experiment", params), cfg, args.quiet,
          [f"experiment dims={','.join(map(str, dims))}: ratio band {report.ratio_band:.4g}"])
    return EXIT_OK


def _report_lines(reports) -> list[str]:
    return [f"{r.name:<24} constant={r.constant:<14.6g} threshold={r.threshold:<10.4g} {r.verdict}"
            for r in reports]


def _cmd_verify(args, cfg):
    th = cfg.thresholds
    if args.suite == "construction":
        N = _single_dim(args, cfg)
        max_rank = 12 if cfg.max_rank is None else cfg.max_rank
        reports = verify_construction_lemmas(N, max_rank, seed=cfg.seed, thresholds=th,
                                             profile=_profile(cfg), threads=cfg.threads)
        params = {"suite": "construction", "N": N, "max_rank": max_rank, "seed": cfg.seed}
        extra = {}
    elif args.suite == "analysis":
        max_rank = 6 if cfg.max_rank is None else cfg.max_rank
        reports = verify_analysis_lemmas(max_rank, cfg.max_rd, thresholds=th,
                                         profile=_profile(cfg), threads=cfg.threads)
        params = {"suite": "analysis", "max_rank": max_rank, "max_rd": cfg.max_rd}
        extra = {}
    else:
        dims = _growth_dims(args, cfg)
        params = {"suite": "growth", "dims": list(dims), "max_rank": cfg.max_rank,
                  "seed": cfg.seed}
        report = growth_experiment(dims, cfg.max_rank, profile=_profile(cfg),
                                   seed=cfg.seed, threads=cfg.threads)
        reports = growth_checks(report, th)
        extra = {"table": report.to_dict()}
    passed = all(r.passed for r in reports)
    params["thresholds"] = th.to_dict()
    body = {"passed": passed, "reports": [r.to_dict() for r in reports]}
    body.update(extra)
    doc = _document("verify", params, body)
    _emit(_json_text(doc), cfg, args.quiet, _report_lines(reports))
    return EXIT_OK if passed else EXIT_FAILED


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "intensity": _cmd_intensity,
    "embedding": _cmd_embedding,
    "experiment": _cmd_experiment,
    "verify": _cmd_verify,
}


def _config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    changes = {
        "out": args.out,
        "format": args.format,
        "seed": args.seed,
        "threads": args.threads,
        "ramp": args.ramp,
        "max_rank": getattr(args, "max_rank", None),
        "max_rd": getattr(args, "max_rd", None),
    }
    return cfg.updated(**changes)


def run_cli(argv=None) -> int:
    """Run the command line and return the exit status.

    Parameters
    ----------
    argv : list of str, optional
        Arguments without the program name; defaults to ``sys.argv[1:]``.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(str(exc))
        return EXIT_USAGE
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    try:
        cfg = _config_from_args(args)
        return _COMMANDS[args.command](args, cfg)
    except (DomainError, PreconditionError) as exc:
        sys.stderr.write(parser.format_usage())
        sys.stderr.write(f"carleson-cex: error: {exc}\n")
        return EXIT_USAGE
    except CarlesonError as exc:
        sys.stderr.write(f"carleson-cex: {exc}\n")
        return EXIT_FAILED


def main() -> None:
    """Console entry point."""
    sys.exit(run_cli())


if __name__ == "__main__":  # pragma: no cover
    main()
