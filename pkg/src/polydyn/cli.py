"""Command-line front end: ``polydyn {degrees,dyndeg,thmD,mixvol}``.

Exit codes: 0 ok, 1 mathematical precondition failed (e.g. resonance),
2 usage error, 3 missing input file, 4 malformed JSON.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import io
from .dynamics import (
    DEFAULT_TOL,
    ResonanceError,
    degree_table,
    dynamical_degrees,
    entropy,
    resonance,
    thmD_validate,
)
from .linalg import RefinementError, SplittingError
from .mixed import mixed_volume_pair

EXIT_OK, EXIT_MATH, EXIT_USAGE, EXIT_MISSING, EXIT_MALFORMED = 0, 1, 2, 3, 4

MAX_D, MAX_N = 4, 12


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    matrix_path: Path | None = None
    polytope_path: Path | None = None
    polytope_paths: tuple[Path, ...] = ()
    k: int | None = None
    kmax: int | None = None
    nmax: int = 10
    tol: float = DEFAULT_TOL
    out_path: Path | None = None
    cache_dir: Path | None = None
    plot_dir: Path | None = None
    threads: int = 1
    no_caps: bool = False


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="polydyn",
        description="Degrees and dynamical degrees of monomial maps via exact mixed volumes.",
    )
    sub = p.add_subparsers(dest="command", metavar="{degrees,dyndeg,thmD,mixvol}")
    sub.required = True

    def common(sp, with_matrix=True):
        if with_matrix:
            sp.add_argument("--matrix", type=Path, help="matrix JSON {'d': .., 'rows': [[..]]}")
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL)

    sp = sub.add_parser("degrees", help="exact degree table deg_k(phi^n) as CSV")
    common(sp)
    sp.add_argument("--kmax", type=int, help="largest k (default d); k runs from 1")
    sp.add_argument("--nmax", type=int, default=10)
    sp.add_argument("--polytope", type=Path, help="ample polytope JSON (default: standard simplex)")
    sp.add_argument("--out", type=Path, help="CSV path (default: stdout)")
    sp.add_argument("--cache-dir", type=Path, help=f"cache directory (default ${io.CACHE_ENV}, else beside --out)")
    sp.add_argument("--plot-dir", type=Path, help="also write two-column n/value files per k")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--no-caps", action="store_true", help=f"allow d > {MAX_D} or n > {MAX_N}")

    sp = sub.add_parser("dyndeg", help="dynamical degrees, entropy and resonance flags")
    common(sp)

    sp = sub.add_parser("thmD", help="compare deg_k(phi^n)/lambda_k^n with the predicted constant")
    common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--nmax", type=int, default=12)
    sp.add_argument("--no-caps", action="store_true")

    sp = sub.add_parser("mixvol", help="mixed volume Vol(P[k], Q[d-k])")
    sp.add_argument("polytopes", nargs=2, type=Path, metavar="P.json")
    sp.add_argument("--k", type=int, required=True)
    return p


def parse_args(argv=None) -> RunConfig:
    """Parse and validate; raises ``SystemExit(2)`` on usage errors."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = RunConfig(command=ns.command)
    cfg.tol = getattr(ns, "tol", DEFAULT_TOL)
    cfg.matrix_path = getattr(ns, "matrix", None)
    cfg.polytope_path = getattr(ns, "polytope", None)
    cfg.polytope_paths = tuple(getattr(ns, "polytopes", ()) or ())
    cfg.k = getattr(ns, "k", None)
    cfg.kmax = getattr(ns, "kmax", None)
    cfg.nmax = getattr(ns, "nmax", cfg.nmax)
    cfg.out_path = getattr(ns, "out", None)
    cfg.cache_dir = getattr(ns, "cache_dir", None)
    cfg.plot_dir = getattr(ns, "plot_dir", None)
    cfg.threads = getattr(ns, "threads", 1)
    cfg.no_caps = getattr(ns, "no_caps", False)
    if not cfg.tol > 0:
        parser.error("--tol must be positive")
    if cfg.nmax < 1:
        parser.error("--nmax must be at least 1")
    if cfg.threads < 1:
        parser.error("--threads must be at least 1")
    if cfg.kmax is not None and cfg.kmax < 0:
        parser.error("--kmax must be nonnegative")
    return cfg


def _read(loader, path: Path | None, what: str):
    if path is None:
        raise CLIError(f"missing {what}", EXIT_MISSING)
    if not path.is_file():
        raise CLIError(f"{what} not found: {path}", EXIT_MISSING)
    try:
        return loader(path)
    except io.MalformedInput as exc:
        raise CLIError(str(exc), EXIT_MALFORMED) from exc


def _check_caps(cfg: RunConfig, d: int, n: int):
    if cfg.no_caps:
        return
    if d > MAX_D or n > MAX_N:
        raise CLIError(f"d={d}, n={n} exceeds default caps d<={MAX_D}, n<={MAX_N}; pass --no-caps", EXIT_USAGE)


def _fmt(x: Fraction) -> str:
    return f"{io.fraction_to_str(x)}  (~{float(x):.12g})"


def cmd_degrees(cfg: RunConfig, out) -> int:
    A = _read(io.load_matrix, cfg.matrix_path, "matrix")
    P = _read(io.load_polytope, cfg.polytope_path, "polytope") if cfg.polytope_path else None
    if P is not None and P.d != A.d:
        raise CLIError("polytope and matrix dimensions differ", EXIT_MALFORMED)
    _check_caps(cfg, A.d, cfg.nmax)
    kmax = A.d if cfg.kmax is None else min(cfg.kmax, A.d)
    cache_dir = cfg.cache_dir or io.default_cache_dir()
    if cache_dir is None and cfg.out_path is not None:
        cache_dir = cfg.out_path.resolve().parent
    cache = io.DegreeCache(cache_dir) if cache_dir is not None else None
    table = degree_table(A, range(1, kmax + 1), cfg.nmax, P, threads=cfg.threads, cache=cache)
    if cfg.out_path is not None:
        try:
            lambdas = dynamical_degrees(A, cfg.tol)
        except (RefinementError, ArithmeticError):
            lambdas = None
        io.emit_table(table, cfg.out_path, lambdas)
        print(f"wrote {cfg.out_path} ({len(table.entries)} entries, hash {table.matrix_hash})", file=out)
    else:
        out.write(io.table_csv(table))
    if cfg.plot_dir is not None:
        io.emit_plot_data(table, cfg.plot_dir)
    return EXIT_OK


def cmd_dyndeg(cfg: RunConfig, out) -> int:
    A = _read(io.load_matrix, cfg.matrix_path, "matrix")
    lam = dynamical_degrees(A, cfg.tol)
    print(f"d = {A.d}", file=out)
    for k, value in enumerate(lam):
        if 1 <= k < A.d:
            kappa, strict = resonance(A, k, cfg.tol)
            flag = f"kappa = {kappa:.12g}  {'non-resonant' if strict else 'RESONANT'}"
        else:
            flag = ""
        print(f"lambda_{k} = {value:.15g}  {flag}".rstrip(), file=out)
    print(f"entropy = {entropy(A, cfg.tol):.15g}", file=out)
    return EXIT_OK


def cmd_thmD(cfg: RunConfig, out) -> int:
    A = _read(io.load_matrix, cfg.matrix_path, "matrix")
    if cfg.k is None or not 1 <= cfg.k <= A.d:
        raise CLIError(f"--k must lie in 1..{A.d}", EXIT_USAGE)
    _check_caps(cfg, A.d, cfg.nmax)
    r = thmD_validate(A, cfg.k, cfg.nmax, tol=cfg.tol)
    print(f"k = {r.k}  lambda_k = {r.lambda_k:.15g}  kappa = {r.kappa:.12g}", file=out)
    print(f"C_predicted   = {r.C_predicted:.15g}", file=out)
    print(f"C_uncorrected = {r.C_uncorrected:.15g}  (d! normalization, for comparison)", file=out)
    print(f"C_empirical   = {r.C_empirical:.15g}  (n = {cfg.nmax})", file=out)
    print(f"splitting condition = {r.splitting_condition:.6g}", file=out)
    print("n,error", file=out)
    for n, e in r.error_sequence:
        print(f"{n},{e:.6e}", file=out)
    bound = math.log(r.kappa) + 0.1 if r.kappa > 0 else -math.inf
    print(f"fitted decay rate = {r.fitted_decay_rate:.6g}  (log kappa + 0.1 = {bound:.6g})", file=out)
    return EXIT_OK


def cmd_mixvol(cfg: RunConfig, out) -> int:
    P, Q = (_read(io.load_polytope, p, "polytope") for p in cfg.polytope_paths)
    if P.d != Q.d:
        raise CLIError("polytopes live in different dimensions", EXIT_MALFORMED)
    if cfg.k is None or not 0 <= cfg.k <= P.d:
        raise CLIError(f"--k must lie in 0..{P.d}", EXIT_USAGE)
    print(_fmt(mixed_volume_pair(P, Q, cfg.k)), file=out)
    return EXIT_OK


COMMANDS = {"degrees": cmd_degrees, "dyndeg": cmd_dyndeg, "thmD": cmd_thmD, "mixvol": cmd_mixvol}


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[cfg.command](cfg, out)
    except CLIError as exc:
        print(f"polydyn: {exc}", file=sys.stderr)
        return exc.code
    except (ResonanceError, SplittingError, RefinementError, ZeroDivisionError) as exc:
        print(f"polydyn: {exc}", file=sys.stderr)
        return EXIT_MATH


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
