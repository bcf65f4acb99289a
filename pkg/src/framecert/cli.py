"""Command-line entry point: ``framecert <subcommand> [options]``.

Every option can also be set through an environment variable named
``FRAMECERT_`` plus the option name in upper case with dashes replaced by
underscores (``--precision-bits`` becomes ``FRAMECERT_PRECISION_BITS``).
Command-line flags win over the environment.

Exit codes: 0 injective / success, 1 non-injective, 2 indeterminate or
rejected certificate, 3 bad input or other operational error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .certifier import (
    EXIT_ERROR,
    EXIT_INDETERMINATE,
    EXIT_INJECTIVE,
    CertificationAborted,
    InjectivityCertificate,
    _normalized_eliminant,
    certify_system,
    default_pair,
    reduce_system,
    verify_certificate,
)
from .exact_arith import format_rational
from .frame_model import Frame, FrameError, HermitianSystem, hermitian_system, linear_presolve
from .groebner import DEFAULT_MAX_TERMS, ResourceLimitExceeded, elimination_ideal
from .multipoly import Polynomial, PolynomialError, VariableTable
from .unipoly import UnivariatePoly, complex_roots, sturm_count_real_roots

log = logging.getLogger("framecert")

ENV_PREFIX = "FRAMECERT_"
SUBCOMMANDS = ("certify", "verify", "eliminate", "sturm", "roots", "recover", "sweep")


class InputError(ValueError):
    """Malformed input file or option; the message names the offending line or field."""


def data_path(name: str) -> Path:
    """Path of a bundled fixture (``eleven_vector_frame.txt``, ``cone_2x2.json``, ...)."""
    return Path(str(resources.files("framecert") / "data" / name))


# ---------------------------------------------------------------------------
# input loading


def load_source(args) -> tuple[HermitianSystem, tuple | None]:
    """The system to work on plus a pair suggested by the input file, if any."""
    if args.frame and args.system:
        raise InputError("give either --frame or --system, not both")
    try:
        if args.frame:
            return hermitian_system(Frame.load(args.frame)), None
        if args.system:
            system = HermitianSystem.load(args.system)
            with open(args.system) as fh:
                pair = json.load(fh).get("pair")
            return system, tuple(pair) if pair else None
    except OSError as exc:
        raise InputError(f"cannot read input: {exc}") from exc
    except (FrameError, PolynomialError) as exc:
        raise InputError(f"{args.frame or args.system}: {exc}") from exc
    raise InputError("this subcommand needs --frame PATH or --system PATH")


def parse_pair(text: str | None):
    if not text:
        return None
    parts = tuple(p.strip() for p in text.split(","))
    if len(parts) != 2 or not all(parts):
        raise InputError(f"--pair expects two names separated by a comma, got {text!r}")
    return parts


_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def load_univariate(path, pair=None) -> UnivariatePoly:
    """Read ``f`` and return ``f(x, 1)``.

    Accepts either a term table (lines ``exp_x exp_y coefficient``) or a
    polynomial expression in one or two variables; with two variables the
    second one (or ``pair[1]``) is set to 1.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    lines = [(k, ln.split("#", 1)[0].strip()) for k, ln in enumerate(text.splitlines(), 1)]
    lines = [(k, ln) for k, ln in lines if ln]
    if not lines:
        raise InputError(f"{path}: no polynomial found")
    if all(re.fullmatch(r"[-+0-9/\s]+", ln) for _, ln in lines) and len(lines[0][1].split()) == 3:
        coeffs: dict[int, Fraction] = {}
        for k, ln in lines:
            parts = ln.split()
            if len(parts) != 3:
                raise InputError(f"{path}: line {k}: expected 'exp_x exp_y coefficient'")
            try:
                ex, ey, c = int(parts[0]), int(parts[1]), Fraction(parts[2])
            except ValueError as exc:
                raise InputError(f"{path}: line {k}: {exc}") from exc
            if ex < 0 or ey < 0:
                raise InputError(f"{path}: line {k}: negative exponent")
            coeffs[ex] = coeffs.get(ex, Fraction(0)) + c
        top = max(coeffs)
        return UnivariatePoly([coeffs.get(e, 0) for e in range(top + 1)])
    expr = " ".join(ln for _, ln in lines)
    names = sorted({m for m in _IDENT.findall(expr) if m != "i"}, key=expr.index)
    if len(names) > 2:
        raise InputError(f"{path}: expected a polynomial in at most two variables, found {names}")
    if not names:
        names = ["x"]
    try:
        p = Polynomial.parse(expr, VariableTable(names))
    except PolynomialError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if len(names) == 1:
        return UnivariatePoly.from_polynomial(p, names[0])
    one = pair[1] if pair and pair[1] in names else names[1]
    free = names[0] if one == names[1] else names[1]
    return UnivariatePoly.from_polynomial(p, free, {one: 1})


def load_certificate(path) -> InjectivityCertificate:
    try:
        return InjectivityCertificate.load(path)
    except OSError as exc:
        raise InputError(f"cannot read certificate: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def write_output(text: str, path: str | None):
    if path and path != "-":
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_certify(args) -> int:
    system, file_pair = load_source(args)
    pair = parse_pair(args.pair) or file_pair
    try:
        result = certify_system(system, pair, threads=args.threads, lift=args.lift, max_terms=args.max_terms,
                                precision_bits=args.precision_bits)
    except CertificationAborted as exc:
        doc = {"verdict": "indeterminate", "reason": f"aborted during {exc.stage}: {exc}",
               "transcript": exc.transcript}
        write_output(json.dumps(doc, indent=1, sort_keys=True, default=str) + "\n", args.out)
        log.error("certification aborted: %s", exc)
        return EXIT_INDETERMINATE
    if isinstance(result, InjectivityCertificate):
        write_output(result.dumps() + "\n", args.out)
    else:
        write_output(json.dumps(result.to_json(), indent=1, sort_keys=True, default=str) + "\n", args.out)
    print(f"verdict: {result.verdict}", file=sys.stderr)
    return result.exit_code


def cmd_verify(args) -> int:
    system, _ = load_source(args)
    if not args.cert:
        raise InputError("verify needs --cert PATH")
    cert = load_certificate(args.cert)
    res = verify_certificate(system, cert)
    print(str(res))
    if res.ok:
        print("verdict: injective")
        return EXIT_INJECTIVE
    return EXIT_INDETERMINATE


def cmd_eliminate(args) -> int:
    system, file_pair = load_source(args)
    pair = parse_pair(args.pair) or file_pair or default_pair(system)
    for name in pair:
        if name not in system.table:
            raise InputError(f"--pair: unknown variable {name!r}")
    presolve, _ = linear_presolve(system, protect=pair)
    rs = reduce_system(system, presolve)
    try:
        elim = elimination_ideal(rs.generators, pair, max_terms=args.max_terms)
    except ResourceLimitExceeded as exc:
        log.error("elimination aborted: %s", exc)
        return EXIT_INDETERMINATE
    if not elim.is_principal:
        log.error("elimination ideal has %d generators; not principal", len(elim.generators))
        write_output("".join(g.to_str() + "\n" for g in elim.generators), args.out)
        return EXIT_INDETERMINATE
    f, _ = _normalized_eliminant(elim.generators[0], None)
    lines = [f"# eliminant in {pair[0]}, {pair[1]}, one term per line",
             f"# exponent_{pair[0]} exponent_{pair[1]} integer_coefficient"]
    ix, iy = f.table.index(pair[0]), f.table.index(pair[1])
    for exp, c in sorted(f.terms.items(), key=lambda t: (-t[0][ix], t[0][iy])):
        lines.append(f"{exp[ix]} {exp[iy]} {format_rational(c.re)}")
    write_output("\n".join(lines) + "\n", args.out)
    return EXIT_INJECTIVE


def cmd_sturm(args) -> int:
    if not args.poly:
        raise InputError("sturm needs a polynomial file (positional argument)")
    p = load_univariate(args.poly, parse_pair(args.pair))
    count = sturm_count_real_roots(p)
    print(count)
    return EXIT_INJECTIVE


def cmd_roots(args) -> int:
    if not args.poly:
        raise InputError("roots needs a polynomial file (positional argument)")
    p = load_univariate(args.poly, parse_pair(args.pair))
    roots = complex_roots(p, args.precision_bits)
    doc = {"degree": p.degree, "precision_bits": args.precision_bits, "roots": [r.to_json() for r in roots]}
    write_output(json.dumps(doc, indent=1) + "\n", args.out)
    return EXIT_INJECTIVE


def cmd_recover(args) -> int:
    from .rank2_recovery import recover_matrices

    system, file_pair = load_source(args)
    cert = load_certificate(args.cert) if args.cert else None
    pair = parse_pair(args.pair) or file_pair
    mats = recover_matrices(system, cert, args.precision_bits, pair, threads=args.threads)
    doc = {"count": len(mats), "matrices": [m.to_json() for m in mats]}
    write_output(json.dumps(doc, indent=1) + "\n", args.out)
    return EXIT_INJECTIVE


def cmd_sweep(args) -> int:
    from .sampler import GridSpec, render_svg, sweep, write_csv

    try:
        grid = GridSpec.parse(args.grid, args.mode) if args.grid else GridSpec(mode=args.mode)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"--grid: {exc}") from exc
    results, summary = sweep(grid, threads=args.threads)
    write_output(write_csv(results), args.out)
    if args.svg:
        Path(args.svg).write_text(render_svg(results, grid))
    print(" ".join(f"{k}={v}" for k, v in summary.items()), file=sys.stderr)
    return EXIT_INJECTIVE


COMMANDS = {
    "certify": cmd_certify,
    "verify": cmd_verify,
    "eliminate": cmd_eliminate,
    "sturm": cmd_sturm,
    "roots": cmd_roots,
    "recover": cmd_recover,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# argument parsing


def _env(name: str, default=None, cast=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError as exc:
        raise InputError(f"environment variable {ENV_PREFIX}{name.upper().replace('-', '_')}: {exc}") from exc


def _flag(raw: str) -> bool:
    return raw.strip().lower() in ("1", "true", "yes", "on")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="framecert", description="Exact injectivity certificates for frames.")
    p.add_argument("command", choices=SUBCOMMANDS)
    p.add_argument("poly", nargs="?", help="polynomial file for sturm and roots")
    p.add_argument("--frame", default=_env("frame"), help="frame file (text: one vector per line, or JSON)")
    p.add_argument("--system", default=_env("system"), help="polynomial system JSON")
    p.add_argument("--cert", default=_env("cert"), help="certificate JSON")
    p.add_argument("--pair", default=_env("pair"), help="elimination pair, e.g. x34,y34")
    p.add_argument("--precision-bits", type=int, default=_env("precision-bits", 256, int))
    p.add_argument("--threads", type=int, default=_env("threads", os.cpu_count() or 1, int))
    p.add_argument("--mode", choices=("exact", "continuation"), default=_env("mode", "continuation"))
    p.add_argument("--grid", default=_env("grid"), help="a0,b0,step,halfwidth")
    p.add_argument("--out", default=_env("out"), help="output path (default stdout)")
    p.add_argument("--svg", default=_env("svg"), help="heatmap output for sweep")
    p.add_argument("--lift", action="store_true", default=_env("lift", False, _flag),
                   help="also store identities in all coordinates")
    p.add_argument("--max-terms", type=int, default=_env("max-terms", DEFAULT_MAX_TERMS, int),
                   help="abort a Groebner computation beyond this many stored terms")
    p.add_argument("-q", "--quiet", action="store_true", default=_env("quiet", False, _flag))
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:  # argparse usage errors
        return EXIT_ERROR if exc.code else 0
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("framecert").setLevel(logging.WARNING if args.quiet else logging.INFO)
    config = {k: v for k, v in sorted(vars(args).items())}
    log.info("config %s", json.dumps(config, sort_keys=True))
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    if args.precision_bits < 16:
        print("error: --precision-bits must be at least 16", file=sys.stderr)
        return EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # operational failure; keep the contract
        log.exception("failed: %s", exc)
        return EXIT_ERROR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
