"""Command-line front end.

Every subcommand writes CSV to stdout, or with ``--out DIR`` writes
``DIR/<command>.csv`` (``.toml`` for symbol-valued results) together with
``DIR/run_manifest.json`` describing inputs, versions, seed and tolerances.

Exit codes: 0 on success, 1 on a domain error (pole, violated hypothesis,
symbol-class constraint), 2 on a usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import symbolfile
from .cms import HermiteBasis, equivalence_residual
from .errors import AppdoError, DomainError
from .frequencies import Frequency, window_enumerate
from .gladyshev import build_kernel, growth_sweep, isometry_sweep, kernel_to_csv, positivity_check
from .grid import Grid
from .spectral import (finite_section_spectrum, invariance_check, multiplication_spectrum,
                       multiplier_spectrum, resolvent_window, weyl_residual)
from .symbols import TPFunction, adjoint_symbol, apply_to_tp, compose_symbols
from .verify import SUITES, report_csv, run_suite

PROG = "appdo"


class UsageError(Exception):
    pass


# ------------------------------------------------------------ parsing


def parse_grid(text: str) -> np.ndarray:
    """``a:b:step`` to the points ``a, a + step, ...`` up to ``b`` inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--grid expects a:b:step, got {text!r}")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"--grid expects numbers in a:b:step, got {text!r}") from None
    if step <= 0 or b < a:
        raise UsageError("--grid needs step > 0 and a <= b")
    count = int(np.floor((b - a) / step + 1e-9)) + 1
    return a + step * np.arange(count)


def grid_points(text: str, dim: int) -> np.ndarray:
    axis = parse_grid(text)
    if dim == 1:
        return axis.reshape(-1, 1)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def parse_vector(text: str, dim: int) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"expected {dim} comma-separated reals, got {text!r}") from None
    if len(vals) != dim:
        raise UsageError(f"expected {dim} comma-separated reals, got {text!r}")
    return np.array(vals)


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"expected a complex number such as 0.5+0.1i, got {text!r}") from None


def parse_term(text: str, count: int) -> tuple:
    if "=" not in text:
        raise UsageError(f"--term expects FREQ=COEFF, got {text!r}")
    freq, coeff = text.split("=", 1)
    freq = freq.strip()
    try:
        lam = Frequency.parse(freq if freq.startswith("(") else f"({freq})")
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad frequency {freq!r}; write rational coordinates such as 1,-1/2") from None
    if lam.rank != count:
        raise UsageError(f"frequency {freq!r} needs {count} coordinates")
    return lam, parse_complex(coeff)


def _fmt(x) -> str:
    return repr(float(x))


def _xi_label(xi) -> str:
    return " ".join(_fmt(v) for v in np.atleast_1d(xi))


def _csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# ----------------------------------------------------------- commands


def _symbol(args, index: int = 0):
    if not args.symbol:
        raise UsageError("--symbol PATH is required")
    if len(args.symbol) <= index:
        raise UsageError(f"{args.command} needs at least {index + 1} --symbol files")
    return symbolfile.load(args.symbol[index])


def _window(args, a):
    return window_enumerate(a.gens, Fraction(args.radius), args.denom)


def _xi(args, dim):
    return np.zeros(dim) if args.xi is None else parse_vector(args.xi, dim)


def cmd_kernel(args):
    a = _symbol(args)
    return kernel_to_csv(build_kernel(a, _xi(args, a.dim), _window(args, a))), "csv", {}


def cmd_compose(args):
    if not args.symbol or len(args.symbol) < 2:
        raise UsageError("compose needs at least two --symbol files")
    result = symbolfile.load(args.symbol[0])
    for path in args.symbol[1:]:
        result = compose_symbols(result, symbolfile.load(path))
    return symbolfile.dumps(result), "toml", {}


def cmd_adjoint(args):
    return symbolfile.dumps(adjoint_symbol(_symbol(args))), "toml", {}


def cmd_apply(args):
    a = _symbol(args)
    if not args.term:
        raise UsageError("apply needs at least one --term FREQ=COEFF")
    coeffs = {}
    for text in args.term:
        lam, c = parse_term(text, a.gens.count)
        coeffs[lam] = coeffs.get(lam, 0j) + c
    out = apply_to_tp(a, TPFunction(a.gens, coeffs))
    rows = [[lam.label(), _fmt(c.real), _fmt(c.imag)] for lam, c in out.coeffs.items()]
    return _csv(rows, ["freq", "re", "im"]), "csv", {}


def cmd_norm_sweep(args):
    a = _symbol(args)
    pts = grid_points(args.grid or "-8:8:0.5", a.dim)
    rep = growth_sweep(a, pts, _window(args, a), args.s, args.m)
    jb = np.sqrt(1 + np.sum(pts**2, axis=1))
    rows = [[_xi_label(p), _fmt(n), _fmt(n / j**rep.p)] for p, n, j in zip(pts, rep.norms, jb)]
    summary = {"C": rep.C, "p": rep.p, "slack": rep.slack, "passes": rep.passes}
    return _csv(rows, ["xi", "norm", "norm_over_growth"]), "csv", summary


def cmd_isometry(args):
    a = _symbol(args)
    pts = grid_points(args.grid, a.dim) if args.grid else np.array([[0.0], [0.3], [1.0], [2.0]])
    if pts.shape[1] != a.dim:
        raise UsageError("the default isometry points are one-dimensional; pass --grid")
    norms = isometry_sweep(a, pts, _window(args, a))
    base = isometry_sweep(a, [np.zeros(a.dim)], _window(args, a))[0]
    rows = [[_xi_label(p), _fmt(n), _fmt(abs(n - base))] for p, n in zip(pts, norms)]
    return _csv(rows, ["xi", "norm", "deviation_from_xi0"]), "csv", {"norm_at_0": base}


def cmd_positivity(args):
    a = _symbol(args)
    pts = grid_points(args.grid, a.dim) if args.grid else _xi(args, a.dim).reshape(1, -1)
    w = _window(args, a)
    tol = args.tol if args.tol is not None else 1e-10
    rows = []
    for p in pts:
        res = positivity_check(build_kernel(a, p, w), tol=tol)
        rows.append([_xi_label(p), str(res.hermitian).lower(), str(res.psd).lower(), _fmt(res.min_eig)])
    return _csv(rows, ["xi", "hermitian", "psd", "min_eig"]), "csv", {}


def cmd_spectrum(args):
    a = _symbol(args)
    if args.mode == "multiplier":
        rep = multiplier_spectrum(a, grid_points(args.grid or "-8:8:0.25", a.dim),
                                  **({"attain_tol": args.tol} if args.tol is not None else {}))
    elif args.mode == "multiplication":
        rep = multiplication_spectrum(a, grid_points(args.grid or "0:8:0.0078125", a.dim))
    else:
        rep = finite_section_spectrum(a, _window(args, a), _xi(args, a.dim))
    return rep.to_csv(), "csv", {"spectrum": rep.metadata}


def cmd_weyl(args):
    a = _symbol(args)
    xi0 = _xi(args, a.dim)
    if args.grid:
        seq = grid_points(args.grid, a.dim)
    else:
        step = np.zeros(a.dim)
        step[0] = 1.0
        seq = np.array([xi0 + 2.0**-k * step for k in range(1, 11)])
    res = weyl_residual(a, xi0, seq, **({"tol": args.tol} if args.tol is not None else {}))
    rows = [[_xi_label(p), _fmt(r)] for p, r in res.residuals]
    return _csv(rows, ["xi", "residual"]), "csv", {"s_re": res.s.real, "s_im": res.s.imag}


def cmd_resolvent(args):
    a = _symbol(args)
    if args.value is None:
        raise UsageError("resolvent needs --value S")
    s = parse_complex(args.value)
    xi = _xi(args, a.dim)
    kw = {"rel_threshold": args.tol} if args.tol is not None else {}
    res = resolvent_window(a, s, _window(args, a), xi, **kw)
    rows = [[_fmt(s.real), _fmt(s.imag), _xi_label(xi), _fmt(res.sigma_min), _fmt(res.inv_norm),
             str(res.solvable).lower()]]
    return _csv(rows, ["s_re", "s_im", "xi", "sigma_min", "inv_norm", "solvable"]), "csv", {}


def cmd_equivalence(args):
    a = _symbol(args)
    basis = HermiteBasis(args.modes, Grid(args.L, args.N, a.dim))
    tol = args.tol if args.tol is not None else 1e-6
    mus = [a.gens.zero()] + [a.gens.unit(i) for i in range(a.gens.count)]
    rows = []
    for mu in mus:
        for n in range(args.modes):
            r = equivalence_residual(a, mu, n, basis)
            rows.append([mu.label(), n, _fmt(r), str(r <= tol).lower()])
    return _csv(rows, ["mu", "n", "residual", "passed"]), "csv", {}


def cmd_invariance(args):
    a = _symbol(args)
    pts = grid_points(args.grid or "-2:2:0.5", a.dim)
    basis = HermiteBasis(args.modes, Grid(args.L, args.N, a.dim))
    res = invariance_check(a, _window(args, a), pts, basis)
    rows = [["kernel_vs_xi_union", _fmt(res.hausdorff_Ul2_vs_UxiD)],
            ["kernel_vs_tensor", _fmt(res.hausdorff_Ul2_vs_A)]]
    return _csv(rows, ["comparison", "hausdorff"]), "csv", {"sizes": res.sizes}


def cmd_verify(args):
    if args.threads > 1:
        with ThreadPoolExecutor(args.threads) as pool:
            results = run_suite(args.suite, args.seed, pool.map)
    else:
        results = run_suite(args.suite, args.seed)
    failed = [r.name for r in results if not r.passed]
    return report_csv(results, args.seed, args.suite), "csv", {"failed": failed}


def cmd_fmt(args):
    a = _symbol(args)
    text = symbolfile.dumps(a)
    if args.in_place:
        Path(args.symbol[0]).write_text(text, encoding="utf-8")
        return "", "toml", {}
    return text, "toml", {}


COMMANDS = {
    "kernel": (cmd_kernel, "kernel matrix of a symbol on a frequency window"),
    "compose": (cmd_compose, "symbol of the composed operator (files in order)"),
    "adjoint": (cmd_adjoint, "formal adjoint symbol"),
    "apply": (cmd_apply, "apply a symbol to a trigonometric polynomial"),
    "norm-sweep": (cmd_norm_sweep, "weighted kernel norms along a xi sweep"),
    "isometry": (cmd_isometry, "kernel norms at several xi against xi = 0"),
    "positivity": (cmd_positivity, "Hermiticity and semidefiniteness of kernels"),
    "spectrum": (cmd_spectrum, "spectrum samples: multiplier, multiplication or finite section"),
    "weyl": (cmd_weyl, "character-sequence residuals near xi0"),
    "resolvent": (cmd_resolvent, "windowed resolvent norm at a spectral parameter"),
    "equivalence": (cmd_equivalence, "tensor versus vector-field representation residuals"),
    "invariance": (cmd_invariance, "Hausdorff distances between finite spectral sets"),
    "verify": (cmd_verify, "run the seeded invariant suites"),
    "fmt": (cmd_fmt, "canonicalize a symbol file"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--symbol", action="append", metavar="PATH", help="symbol file (repeat for compose)")
    common.add_argument("--xi", metavar="V", help="frequency point, comma separated for dim > 1")
    common.add_argument("--radius", type=Fraction, default=Fraction(4), metavar="R",
                        help="window coefficient bound (default 4)")
    common.add_argument("--denom", type=int, default=1, metavar="Q", help="window denominator bound")
    common.add_argument("--grid", metavar="a:b:step", help="sample points, endpoints included")
    common.add_argument("--s", type=float, default=0.0, metavar="REAL", help="Sobolev weight")
    common.add_argument("--m", type=float, default=None, metavar="REAL", help="order (default: the file's m)")
    common.add_argument("--L", type=float, default=16.0, help="box length of the y grid")
    common.add_argument("--N", type=int, default=256, help="points per axis of the y grid")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", metavar="DIR", help="write results and run_manifest.json here")
    common.add_argument("--tol", type=float, default=None, help="tolerance of the command's check")

    parser = argparse.ArgumentParser(prog=PROG, description="Almost-periodic pseudodifferential operator toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name == "apply":
            p.add_argument("--term", action="append", metavar="FREQ=COEFF",
                           help="input coefficient, e.g. 1,-1/2=0.5+1i (repeatable)")
        if name == "spectrum":
            p.add_argument("--mode", choices=["multiplier", "multiplication", "finite-section"],
                           default="finite-section")
        if name == "resolvent":
            p.add_argument("--value", metavar="S", help="spectral parameter, e.g. 0.5+0.1i")
        if name in ("equivalence", "invariance"):
            p.add_argument("--modes", type=int, default=3 if name == "equivalence" else 12,
                           help="number of Hermite modes")
        if name == "verify":
            p.add_argument("--suite", choices=sorted(SUITES), default="all")
        if name == "fmt":
            p.add_argument("--in-place", action="store_true", help="rewrite the file")
    return parser


def _versions() -> dict:
    from importlib import metadata

    try:
        own = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        own = "unknown"
    return {"artifact": own, "numpy": np.__version__, "python": platform.python_version()}


def _manifest(args, output_name: str, extra: dict) -> dict:
    inputs = {}
    for path in args.symbol or []:
        data = Path(path).read_bytes()
        inputs[str(path)] = {"sha256": hashlib.sha256(data).hexdigest()}
    options = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in sorted(vars(args).items())
               if k not in ("out", "symbol", "command")}
    return {"command": args.command, "inputs": inputs, "options": options, "seed": args.seed,
            "tolerances": {"tol": args.tol}, "versions": _versions(), "outputs": [output_name],
            "results": extra}


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, tuple):
        return list(obj)
    return str(obj)


_VALUE_FLAGS = {"--grid", "--xi", "--value", "--term", "--s", "--m"}


def _attach_values(argv: list) -> list:
    """Glue ``--grid -2:2:1`` into ``--grid=-2:2:1`` so leading minus signs are not read as flags."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run_command(argv=None) -> int:
    parser = build_parser()
    argv = _attach_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        print(f"{PROG}: error: --threads must be at least 1", file=sys.stderr)
        return 2
    fn, _ = COMMANDS[args.command]
    try:
        text, ext, extra = fn(args)
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            name = f"{args.command}.{ext}"
            (out / name).write_text(text, encoding="utf-8")
            manifest = _manifest(args, name, extra)
            (out / "run_manifest.json").write_text(
                json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n", encoding="utf-8")
        else:
            sys.stdout.write(text)
    except DomainError as exc:
        print(f"{PROG}: domain error: {exc}", file=sys.stderr)
        return 1
    except (AppdoError, UsageError, ValueError, OSError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    if args.command == "verify" and extra["failed"]:
        print(f"{PROG}: failed checks: {', '.join(extra['failed'])}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    return run_command(argv)


if __name__ == "__main__":
    sys.exit(main())
