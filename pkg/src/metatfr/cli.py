"""Command-line front end: ``metatfr compute | verify | probe | sample``.

Exit codes: 0 pass, 1 verification failure, 2 parse error, 3 dimension
mismatch, 4 inadmissible field.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import os
import subprocess
import sys
import tempfile

import numpy as np

from . import __version__
from .covariance import (
    THRESHOLDS,
    BlackBoxTFR,
    a_wigner_box,
    negative_control,
    run_covariance,
    stft_box,
    wigner_box,
)
from .grid import (
    AdmissibilityError,
    Field,
    Grid,
    GridMismatchError,
    check_admissible,
    conjugate,
    gaussian,
    hermite,
)
from .io import ParseError, dumps_report, read_field, read_matrix, write_field, write_matrix, write_pgm
from .symplectic import NotSymplecticError, check_symplectic, expected_phi_wigner, random_symplectic
from .tfr import a_wigner, stft, wigner_fast
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_ADMISSIBILITY = 4

CONTROLS = ("broken-phase", "nonlinear-phi", "degenerate")


class ExternalError(RuntimeError):
    """An external black box answered ``err`` or broke the protocol."""


def _grid_size(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n % 2 or not 16 <= n <= 512:
        raise argparse.ArgumentTypeError("N must be even with 16 <= N <= 512")
    return n


def _positive(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _emit(report: dict, out, no_timestamp: bool) -> None:
    if not no_timestamp:
        report["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    text = dumps_report(report)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- compute ----------------------------------------------------------------


def cmd_compute(args) -> int:
    f = read_field(args.f)
    g = read_field(args.g)
    if f.grid.vars != 1 or g.grid.vars != 1:
        raise GridMismatchError("compute takes two 1-variable signals")
    if f.grid != g.grid:
        raise GridMismatchError(f"signals live on different grids (N={f.grid.N} and N={g.grid.N})")
    check_admissible(f)
    check_admissible(g)
    mode = args.mode
    if args.kind == "wigner":
        out = wigner_fast(f, g if (mode or "sesquilinear") == "sesquilinear" else conjugate(g))
    elif args.kind == "stft":
        out = stft(f, g if (mode or "sesquilinear") == "sesquilinear" else conjugate(g))
    else:
        if not args.matrix:
            raise ParseError("<args>", 0, "a-wigner needs --matrix")
        A = read_matrix(args.matrix)
        if A.shape != (4, 4):
            raise GridMismatchError(f"a-wigner needs a 4x4 matrix, got {A.shape[0]}x{A.shape[1]}")
        out = a_wigner(check_symplectic(A), f, g, mode or "bilinear")
    write_field(args.out, out)
    if args.pgm:
        write_pgm(args.pgm, out)
    return EXIT_OK


# --- verify -----------------------------------------------------------------


def cmd_verify(args) -> int:
    report = run_suite(
        args.suite, N=args.n, seed=args.seed, tol_scale=args.tol_scale, timing=not args.no_timestamp
    )
    report["tool"] = "metatfr"
    report["version"] = __version__
    _emit(report, args.out, args.no_timestamp)
    return EXIT_OK if report["pass"] else EXIT_FAIL


# --- probe ------------------------------------------------------------------


class ExternalBox:
    """Black box served by a child process over the line protocol
    ``eval <f.csv> <g.csv> <out.csv>`` answered by ``ok`` or ``err <msg>``."""

    def __init__(self, path: str):
        cmd = [sys.executable, path] if path.endswith(".py") else [path]
        self.proc = subprocess.Popen(
            cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, bufsize=1
        )
        self.tmp = tempfile.TemporaryDirectory(prefix="metatfr-")
        self.calls = 0

    def __call__(self, f: Field, g: Field) -> Field:
        self.calls += 1
        base = os.path.join(self.tmp.name, f"call{self.calls}")
        paths = [base + "_f.csv", base + "_g.csv", base + "_out.csv"]
        write_field(paths[0], f)
        write_field(paths[1], g)
        try:
            self.proc.stdin.write("eval " + " ".join(paths) + "\n")
            self.proc.stdin.flush()
        except BrokenPipeError:
            raise ExternalError("external evaluator exited") from None
        reply = self.proc.stdout.readline().strip()
        if reply == "ok":
            out = read_field(paths[2])
            if out.grid != f.grid.with_vars(2):
                raise GridMismatchError("external evaluator returned a field on the wrong grid")
            return out
        if reply.startswith("err"):
            raise ExternalError(f"external evaluator: {reply[3:].strip() or 'error'}")
        raise ExternalError(f"external evaluator sent {reply!r}")

    def close(self):
        if self.proc.poll() is None:
            self.proc.stdin.close()
            try:
                self.proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                self.proc.kill()
        self.tmp.cleanup()


def _resolve_target(target: str, mode, seed: int):
    """Return ``(box, expected matrix, its ordering, cleanup)``.

    The ordering is ``"probe"`` or ``"field"``; see :mod:`metatfr.covariance`.
    """
    if target == "wigner":
        mode = mode or "sesquilinear"
        box = wigner_box(mode)
        expected = expected_phi_wigner(mode)
        return box, expected, "probe", None
    if target == "stft":
        if mode == "bilinear":
            box = BlackBoxTFR(lambda f, g: stft(f, conjugate(g)), "bilinear", "stft-bilinear")
        else:
            box = stft_box()
        return box, None, None, None
    if target.startswith("a-wigner:"):
        src = target.split(":", 1)[1]
        if src == "random":
            A = random_symplectic(seed, 2)
        else:
            A = read_matrix(src)
            if A.shape != (4, 4):
                raise GridMismatchError(f"a-wigner needs a 4x4 matrix, got {A.shape[0]}x{A.shape[1]}")
        A = check_symplectic(A)
        box = a_wigner_box(A, mode=mode or "bilinear")
        return box, A, "field", None
    if target.startswith("control:"):
        kind = target.split(":", 1)[1]
        if kind not in CONTROLS:
            raise ParseError("<target>", 0, f"unknown control {kind!r}; choose from {CONTROLS}")
        return negative_control(kind), None, None, None
    if target.startswith("exec:"):
        ext = ExternalBox(target.split(":", 1)[1])
        box = BlackBoxTFR(ext, mode or "bilinear", target, serial=True)
        return box, None, None, ext.close
    raise ParseError("<target>", 0, f"unknown probe target {target!r}")


def cmd_probe(args) -> int:
    box, expected, ordering, cleanup = _resolve_target(args.target, args.mode, args.seed)
    thresholds = {k: v * args.tol_scale for k, v in THRESHOLDS.items()}
    thresholds["nondegeneracy_min"] = THRESHOLDS["nondegeneracy_min"] / args.tol_scale
    try:
        rep = run_covariance(box, Grid(args.n), seed=args.seed, thresholds=thresholds)
    finally:
        if cleanup:
            cleanup()
    report = rep.to_dict()
    report["target"] = args.target
    report["mode"] = box.mode
    report["seed"] = args.seed
    ok = rep.passed
    if expected is not None:
        got = rep.phi.matrix if ordering == "probe" else rep.phi.field_matrix
        err = float(np.max(np.abs(got - expected)))
        report["expected_matrix"] = np.asarray(expected).tolist()
        report["expected_matrix_error"] = err
        report["expected_matrix_match"] = err <= THRESHOLDS["symplectic_defect"] * args.tol_scale
        ok = ok and report["expected_matrix_match"]
    report["pass"] = bool(ok)
    _emit(report, args.out, args.no_timestamp)
    return EXIT_OK if ok else EXIT_FAIL


# --- sample -----------------------------------------------------------------


def cmd_sample(args) -> int:
    grid = Grid(args.n)
    if args.kind == "gaussian":
        f = gaussian(grid, center=args.center, freq=args.freq)
    elif args.kind.startswith("hermite:"):
        f = hermite(int(args.kind.split(":", 1)[1]), grid)
    elif args.kind == "random-matrix":
        write_matrix(args.out, random_symplectic(args.seed, 2))
        return EXIT_OK
    else:
        raise ParseError("<kind>", 0, f"unknown sample {args.kind!r}")
    write_field(args.out, f)
    return EXIT_OK


# --- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="metatfr", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"metatfr {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n_default):
        sp.add_argument("--n", type=_grid_size, default=n_default, help="grid size N (even, 16..512)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="output path (stdout for reports if omitted)")
        sp.add_argument("--tol-scale", type=_positive, default=1.0, help="multiply every threshold")
        sp.add_argument("--no-timestamp", action="store_true", help="omit timestamps and timings")

    c = sub.add_parser("compute", help="compute a representation of two signal CSVs")
    c.add_argument("kind", choices=("wigner", "stft", "a-wigner"))
    c.add_argument("f")
    c.add_argument("g")
    c.add_argument("--matrix", help="symplectic 4x4 matrix CSV for a-wigner")
    c.add_argument("--mode", choices=("bilinear", "sesquilinear"))
    c.add_argument("--out", required=True)
    c.add_argument("--pgm", help="also write a magnitude image")
    c.set_defaults(func=cmd_compute)

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("suite", choices=SUITES + ("all",))
    common(v, 128)
    v.set_defaults(func=cmd_verify)

    pr = sub.add_parser("probe", help="recover and certify the covariance of a representation")
    pr.add_argument(
        "target",
        help="wigner | stft | a-wigner:<matrix.csv|random> | control:<kind> | exec:<path>",
    )
    pr.add_argument("--mode", choices=("bilinear", "sesquilinear"))
    common(pr, 64)
    pr.set_defaults(func=cmd_probe)

    s = sub.add_parser("sample", help="write a test signal or a random symplectic matrix")
    s.add_argument("kind", help="gaussian | hermite:<n> | random-matrix")
    s.add_argument("--n", type=_grid_size, default=64)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--center", type=float, default=0.0)
    s.add_argument("--freq", type=float, default=0.0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotSymplecticError as exc:
        print(f"invalid matrix: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except GridMismatchError as exc:
        print(f"dimension mismatch: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except AdmissibilityError as exc:
        print(f"inadmissible field: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except ExternalError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
