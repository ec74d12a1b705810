"""Command-line front end.

    revivalkit design      engineer chain couplings (closed form or from a
                           spectrum file) and certify revival conditions
    revivalkit evolve      amplitude table of a 1D chain over a time list
    revivalkit amplitude2d amplitude grid of the triangular lattice walk
    revivalkit verify      run an identity suite (hamming/ordered/bivariate)

Times are decimal literals or exact pi fractions ("pi/4", "3pi/4", "2pi");
a range START:STOP:NUM expands to NUM inclusive linspace points.  Exit
codes: 0 ok, 2 usage or validation error, 3 invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib.metadata import version as _pkg_version

import numpy as np

from . import bivariate_krawtchouk as bk
from . import chain_dynamics as cd
from . import hamming_scheme as hs
from . import ordered_hamming as oh
from . import spectral_design as sd
from .orthopoly import (InfeasibleParametersError, ParaKrawtchoukParams,
                        RecurrenceCoefficients, krawtchouk_chain,
                        para_krawtchouk_chain)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3

_PI_RE = re.compile(r"^([+-]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?$")


def _tool_version() -> str:
    try:
        return _pkg_version("revivalkit")
    except Exception:
        return "unknown"


def parse_time(text: str) -> float:
    """Decimal literal or exact pi fraction like "pi/4", "3pi/4", "2pi"."""
    s = text.strip().lower()
    m = _PI_RE.match(s)
    if m:
        coef = m.group(1)
        num = float(coef) if coef not in ("", "+", "-") else float(coef + "1")
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * np.pi / den
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse time {text!r}") from None


def parse_times(text: str) -> np.ndarray:
    """Comma list of times, or START:STOP:NUM inclusive range."""
    s = text.strip()
    if not s:
        raise argparse.ArgumentTypeError("time list is empty")
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(
                "range must be START:STOP:NUM, e.g. 0:pi:65")
        start, stop = parse_time(parts[0]), parse_time(parts[1])
        try:
            num = int(parts[2])
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"range point count must be an integer, got {parts[2]!r}"
            ) from None
        if num < 2:
            raise argparse.ArgumentTypeError("range needs at least 2 points")
        return np.linspace(start, stop, num)
    return np.array([parse_time(tok) for tok in s.split(",")])


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_document(config: dict, payload: dict) -> str:
    doc = {
        "tool": {"name": "revivalkit", "version": _tool_version()},
        "config": config,
        **payload,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _chain_from_args(args) -> RecurrenceCoefficients:
    if args.chain == "krawtchouk":
        return krawtchouk_chain(args.n, args.beta)
    if args.chain == "para":
        if args.n % 2 == 1:
            return para_krawtchouk_chain(
                ParaKrawtchoukParams(N=args.n, beta=args.beta, delta=args.delta))
        # no closed form printed for even N: go through the spectrum
        return sd.reconstruct_jacobi(
            sd.bilattice_spectrum(args.n, args.beta, args.delta))
    with open(args.couplings_file) as fh:
        data = json.load(fh)
    return RecurrenceCoefficients(J=np.asarray(data["J"], dtype=float),
                                  B=np.asarray(data["B"], dtype=float))


# ----------------------------------------------------------------------
# design
# ----------------------------------------------------------------------

def cmd_design(args) -> int:
    config = {"command": "design", "source": args.source,
              "format": args.format}
    try:
        if args.source == "krawtchouk":
            config.update(n=args.n, beta=args.beta)
            coeffs = krawtchouk_chain(args.n, args.beta)
            spectrum = sd.bilattice_spectrum(args.n, args.beta, 1.0)
        elif args.source == "para":
            config.update(n=args.n, beta=args.beta, delta=args.delta)
            if args.n % 2 == 1:
                coeffs = para_krawtchouk_chain(ParaKrawtchoukParams(
                    N=args.n, beta=args.beta, delta=args.delta))
            else:
                coeffs = sd.reconstruct_jacobi(
                    sd.bilattice_spectrum(args.n, args.beta, args.delta))
            spectrum = sd.bilattice_spectrum(args.n, args.beta, args.delta)
        else:  # bilattice-file
            config.update(file=args.spectrum_file)
            with open(args.spectrum_file) as fh:
                data = json.load(fh)
            points = data["points"] if isinstance(data, dict) else data
            try:
                spectrum = sd.Spectrum(points=np.asarray(points, dtype=float))
            except ValueError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_USAGE
            coeffs = sd.reconstruct_jacobi(spectrum)
    except sd.InfeasibleSpectrumError as exc:
        print(f"error: {exc} (index {exc.index})", file=sys.stderr)
        return EXIT_INVARIANT
    except InfeasibleParametersError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    certificate = None
    if args.time is not None:
        config["time"] = args.time
        check = sd.check_fr_condition(spectrum, args.time)
        if isinstance(check, sd.FRCertificate):
            certificate = {
                "accepted": True, "T": check.T, "phi": check.phi,
                "theta": check.theta,
                "mu": [check.mu.real, check.mu.imag],
                "nu": [check.nu.real, check.nu.imag],
                "residual": check.residual,
                "pst": check.is_pst,
            }
        else:
            certificate = {"accepted": False, "T": check.T,
                           "violating_index": check.index,
                           "residual": check.residual}

    mirror = sd.mirror_symmetric(coeffs, tol=1e-8)
    if args.format == "json":
        text = _json_document(config, {
            "couplings": {"J": coeffs.J.tolist(), "B": coeffs.B.tolist()},
            "spectrum": spectrum.points.tolist(),
            "mirror_symmetric": mirror,
            "fr_certificate": certificate,
        })
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["n", "B_n", "J_to_next", "eigenvalue"])
        J = coeffs.J
        for n in range(coeffs.n_sites):
            writer.writerow([n, repr(float(coeffs.B[n])),
                             repr(float(J[n])) if n < len(J) else "",
                             repr(float(spectrum.points[n]))])
        text = buf.getvalue()
    _emit(text, args.output)
    if args.plot:
        from . import plotting
        plotting.plot_couplings(coeffs, args.plot)
    return EXIT_OK


# ----------------------------------------------------------------------
# evolve (1D)
# ----------------------------------------------------------------------

def cmd_evolve(args) -> int:
    config = {"command": "evolve", "chain": args.chain, "source": args.site,
              "format": args.format, "times": args.times}
    try:
        times = parse_times(args.times)
        coeffs = _chain_from_args(args)
        if args.chain != "file":
            config.update(n=args.n, beta=args.beta)
            if args.chain == "para":
                config["delta"] = args.delta
        else:
            config["couplings_file"] = args.couplings_file
        es = cd.eigendecompose(coeffs)
        if not 0 <= args.site < coeffs.n_sites:
            raise ValueError(f"source site must lie in 0..{coeffs.n}")
    except (argparse.ArgumentTypeError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    phases = np.exp(-1j * np.outer(times, es.values))
    amps = phases @ (es.vectors * es.vectors[args.site]).T
    norms = np.sum(np.abs(amps) ** 2, axis=1)
    code = EXIT_OK
    if np.abs(norms - 1.0).max() > args.tol:
        print(f"error: amplitude row norm deviates by "
              f"{np.abs(norms - 1.0).max():.3e} (tol {args.tol})",
              file=sys.stderr)
        code = EXIT_INVARIANT

    if args.format == "json":
        rows = [{"t": float(t),
                 "amplitudes": [[a.real, a.imag] for a in amps[k]],
                 "norm_sq": float(norms[k])}
                for k, t in enumerate(times)]
        text = _json_document(config, {"n_sites": coeffs.n_sites,
                                       "rows": rows})
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["time", "site", "re", "im", "abs2", "norm_sq"])
        for k, t in enumerate(times):
            for n in range(coeffs.n_sites):
                a = complex(amps[k, n])
                writer.writerow([repr(float(t)), n, repr(a.real), repr(a.imag),
                                 repr(abs(a) ** 2), repr(float(norms[k]))])
        text = buf.getvalue()
    _emit(text, args.output)
    if args.plot:
        from . import plotting
        plotting.plot_chain_amplitudes(times, amps, args.plot)
    return code


# ----------------------------------------------------------------------
# amplitude2d
# ----------------------------------------------------------------------

def cmd_amplitude2d(args) -> int:
    config = {"command": "amplitude2d", "n": args.n, "alpha": args.alpha,
              "beta": args.beta, "format": args.format, "times": args.times}
    try:
        times = parse_times(args.times)
        if args.n < 1:
            raise ValueError("n must be >= 1")
        if args.alpha <= 0 or args.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        grid = oh.amplitude_grid(args.n, args.alpha, args.beta, times)
    except (argparse.ArgumentTypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    norms = grid.norms()
    code = EXIT_OK
    if np.abs(norms - 1.0).max() > args.tol:
        print(f"error: amplitude row norm deviates by "
              f"{np.abs(norms - 1.0).max():.3e} (tol {args.tol})",
              file=sys.stderr)
        code = EXIT_INVARIANT

    sites = [(i, j) for i in range(args.n + 1) for j in range(args.n + 1 - i)]
    if args.format == "json":
        rows = []
        for k, t in enumerate(grid.times):
            rows.append({
                "t": float(t),
                "amplitudes": [
                    {"i": i, "j": j,
                     "re": grid.values[k, i, j].real,
                     "im": grid.values[k, i, j].imag}
                    for (i, j) in sites],
                "norm_sq": float(norms[k]),
            })
        text = _json_document(config, {"rows": rows})
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["time", "i", "j", "re", "im", "abs2", "norm_sq"])
        for k, t in enumerate(grid.times):
            for (i, j) in sites:
                a = complex(grid.values[k, i, j])
                writer.writerow([repr(float(t)), i, j, repr(a.real),
                                 repr(a.imag), repr(abs(a) ** 2),
                                 repr(float(norms[k]))])
        text = buf.getvalue()
    _emit(text, args.output)
    if args.plot:
        from . import plotting
        plotting.plot_triangle_amplitudes(grid, args.plot)
    return code


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------

def _verify_hamming(n: int, rng: np.random.Generator) -> dict:
    checks = {}

    def bose_mesner():
        rep = hs.verify_bose_mesner(n)
        return {"max_deviation": rep.max_deviation, "passed": rep.passed}

    def eigenvalues():
        rep = hs.krawtchouk_eigenvalue_check(n)
        return {"max_residual": rep.max_residual, "passed": rep.passed}

    def projection():
        worst = 0.0
        for t in rng.uniform(0.1, np.pi, 3):
            rep = hs.projection_equivalence(n, float(t))
            worst = max(worst, rep.max_deviation, rep.column_leakage)
        return {"max_deviation": worst, "passed": worst < 1e-9}

    def duality():
        from .orthopoly import KrawtchoukParams, krawtchouk_eval
        from math import comb
        params = KrawtchoukParams(N=n, p=0.5)
        P1 = np.array([[comb(n, i) * krawtchouk_eval(i, s, params)
                        for i in range(n + 1)] for s in range(n + 1)])
        dev = float(np.abs(P1 @ P1 - 2**n * np.eye(n + 1)).max())
        return {"max_deviation": dev, "passed": dev < 1e-8}

    tasks = {"bose_mesner": bose_mesner, "krawtchouk_eigenvalues": eigenvalues,
             "column_projection": projection, "self_duality": duality}
    return _run_tasks(tasks, checks)


def _verify_ordered(n: int, rng: np.random.Generator) -> dict:
    checks = {}

    def partition():
        total = 0
        worst = 0
        for (i, j) in bk.triangle(n):
            count = len(oh.words_of_shape(n, (i, j)))
            worst = max(worst, abs(count - oh.column_cardinality(n, i, j)))
            total += count
        ok = worst == 0 and total == 4**n
        return {"max_deviation": worst, "total_words": total, "passed": ok}

    def bose_mesner():
        rep = oh.verify_ordered_bose_mesner(min(n, oh.BOSE_MESNER_MAX_N))
        return {"N": rep.N, "max_deviation": rep.max_deviation,
                "passed": rep.passed}

    def projection():
        worst = 0.0
        for t in rng.uniform(0.1, 1.0, 3):
            a, b = rng.uniform(0.5, 2.0, 2)
            rep = oh.project_ordered_walk(n, float(a), float(b), float(t))
            worst = max(worst, rep.max_deviation, rep.column_leakage)
        return {"max_deviation": worst, "passed": worst < 1e-8}

    def closed_form():
        worst = 0.0
        op = None
        for _ in range(5):
            a, b = rng.uniform(0.5, 2.0, 2)
            t = float(rng.uniform(0.0, 2 * np.pi))
            op = oh.triangle_hamiltonian(n, float(a), float(b))
            amp = oh.triangle_evolve(op, t)
            cf = np.array([oh.closed_form_amplitude(n, float(a), float(b), t, i, j)
                           for (i, j) in op.sites])
            worst = max(worst, float(np.abs(amp - cf).max()))
        return {"max_deviation": worst, "passed": worst < 1e-9}

    tasks = {"shape_partition": partition, "bose_mesner": bose_mesner,
             "walk_projection": projection, "closed_form_amplitude": closed_form}
    return _run_tasks(tasks, checks)


def _verify_bivariate(n: int, rng: np.random.Generator) -> dict:
    checks = {}

    def tratnik_griffiths():
        params = bk.TratnikParams(N=n, p=0.5, q=0.25)
        g = bk.GriffithsParams.tratnik(0.5, 0.25)
        worst = 0.0
        for idx in bk.triangle(n):
            for pt in bk.triangle(n):
                worst = max(worst, abs(
                    bk.tratnik_eval(idx, pt, params)
                    - bk.griffiths_eval(idx, pt, g, n)))
        return {"max_deviation": worst, "passed": worst < 1e-10}

    def gram():
        tri = bk.triangle(n)
        params = bk.TratnikParams(N=n, p=0.5, q=0.25)
        w = np.array([bk.trinomial_weight(params, x, y) for (x, y) in tri])
        P = np.array([[bk.orthonormal_eval(idx, pt, n) for pt in tri]
                      for idx in tri])
        dev = float(np.abs((P * w) @ P.T - np.eye(len(tri))).max())
        return {"max_deviation": dev, "passed": dev < 1e-9}

    def seven_term():
        worst = 0.0
        for _ in range(5):
            rot = bk.random_rotation(rng, N=n)
            rep = bk.verify_seven_term(rot, n)
            worst = max(worst, rep.max_residual)
        return {"max_residual": worst, "passed": worst < 1e-8}

    def weights():
        worst = 0.0
        for _ in range(20):
            rot = bk.random_rotation(rng)
            total = sum(bk.so3_weight(rot, n, pt) ** 2 for pt in bk.triangle(n))
            worst = max(worst, abs(total - 1.0))
        return {"max_deviation": worst, "passed": worst < 1e-12}

    def generating():
        params = bk.TratnikParams(N=n, p=0.5, q=0.25)
        worst = 0.0
        for _ in range(20):
            s, t = rng.uniform(-1.0, 1.0, 2)
            i = int(rng.integers(0, n + 1))
            j = int(rng.integers(0, n + 1 - i))
            rep = bk.generating_function_check(params, (i, j), float(s), float(t))
            worst = max(worst, rep.residual)
        return {"max_residual": worst, "passed": worst < 1e-9}

    tasks = {"tratnik_griffiths": tratnik_griffiths, "gram_identity": gram,
             "seven_term": seven_term, "so3_weights": weights,
             "generating_function": generating}
    return _run_tasks(tasks, checks)


def _run_tasks(tasks: dict, checks: dict) -> dict:
    max_workers = int(os.environ.get("REVIVALKIT_THREADS", "0")) or None
    if max_workers == 1:
        for name, fn in tasks.items():
            checks[name] = fn()
        return checks
    with ThreadPoolExecutor(max_workers=max_workers or len(tasks)) as pool:
        futures = {name: pool.submit(fn) for name, fn in tasks.items()}
        for name, fut in futures.items():
            checks[name] = fut.result()
    return checks


_VERIFY_CAPS = {"hamming": 10, "ordered": 7, "bivariate": 12}


def cmd_verify(args) -> int:
    cap = _VERIFY_CAPS[args.target]
    if args.n > cap:
        print(f"error: verify {args.target} caps n at {cap}, got {args.n}",
              file=sys.stderr)
        return EXIT_USAGE
    if args.n < 1:
        print("error: n must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    rng = np.random.default_rng(args.seed)
    runner = {"hamming": _verify_hamming, "ordered": _verify_ordered,
              "bivariate": _verify_bivariate}[args.target]
    checks = runner(args.n, rng)
    all_passed = all(c["passed"] for c in checks.values())
    config = {"command": "verify", "target": args.target, "n": args.n,
              "seed": args.seed}
    text = _json_document(config, {"checks": checks, "passed": all_passed})
    _emit(text, args.output)
    return EXIT_OK if all_passed else EXIT_INVARIANT


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def _add_io_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--plot", metavar="PATH",
                   help="also render a figure of the result to PATH")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revivalkit",
        description="engineer, evolve and verify revival spin chains/lattices")
    sub = parser.add_subparsers(dest="command", required=True)

    p_design = sub.add_parser("design", help="chain couplings from a recipe")
    dsub = p_design.add_subparsers(dest="source", required=True)
    for name in ("krawtchouk", "para"):
        dp = dsub.add_parser(name)
        dp.add_argument("--n", type=int, required=True)
        dp.add_argument("--beta", type=float, default=1.0)
        if name == "para":
            dp.add_argument("--delta", type=float, required=True)
        dp.add_argument("--time", type=parse_time, default=None,
                        help="certify revival at this time (e.g. pi)")
        _add_io_flags(dp)
        dp.set_defaults(func=cmd_design)
    dp = dsub.add_parser("bilattice-file",
                         help="reconstruct couplings from a JSON spectrum")
    dp.add_argument("spectrum_file")
    dp.add_argument("--time", type=parse_time, default=None)
    _add_io_flags(dp)
    dp.set_defaults(func=cmd_design)

    p_evolve = sub.add_parser("evolve", help="1D amplitude table")
    p_evolve.add_argument("--chain", choices=("krawtchouk", "para", "file"),
                          default="krawtchouk")
    p_evolve.add_argument("--n", type=int, default=None)
    p_evolve.add_argument("--beta", type=float, default=1.0)
    p_evolve.add_argument("--delta", type=float, default=None)
    p_evolve.add_argument("--couplings-file")
    p_evolve.add_argument("--times", required=True,
                          help='e.g. "0:pi:65" or "pi/4,pi/2,pi"')
    p_evolve.add_argument("--site", type=int, default=0)
    p_evolve.add_argument("--tol", type=float, default=1e-10,
                          help="per-row norm tolerance (exit 3 beyond)")
    _add_io_flags(p_evolve)
    p_evolve.set_defaults(func=cmd_evolve)

    p_amp = sub.add_parser("amplitude2d", help="triangular lattice amplitudes")
    p_amp.add_argument("--n", type=int, required=True)
    p_amp.add_argument("--alpha", type=float, required=True)
    p_amp.add_argument("--beta", type=float, required=True)
    p_amp.add_argument("--times", required=True,
                       help='e.g. "pi/6,pi/5,pi/4,pi/3,pi/2"')
    p_amp.add_argument("--tol", type=float, default=1e-10)
    _add_io_flags(p_amp)
    p_amp.set_defaults(func=cmd_amplitude2d)

    p_verify = sub.add_parser("verify", help="run an identity suite")
    p_verify.add_argument("target", choices=("hamming", "ordered", "bivariate"))
    p_verify.add_argument("--n", type=int, required=True)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--output")
    p_verify.set_defaults(func=cmd_verify)

    return parser


def _validate(args, parser) -> None:
    if args.command == "evolve":
        if args.chain in ("krawtchouk", "para") and args.n is None:
            parser.error("--n is required for closed-form chains")
        if args.chain == "para" and args.delta is None:
            parser.error("--delta is required for para chains")
        if args.chain == "file" and not args.couplings_file:
            parser.error("--couplings-file is required with --chain file")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(args, parser)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
