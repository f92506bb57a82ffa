"""Command-line front end.

Verbs:
    validate   parse and structurally validate a system file
    sample     draw seeded observations and write the audit CSV
    solve      fit quadratic forms to samples, print the certificate
    bounds     full pipeline at one confidence level
    sweep      N-sweep over confidence levels: CSV + plot script + SVG
    whitebox   grid-fitted exactly-certified bracket (needs the matrices)
    cycles     brute-force cycle lower bound (needs the matrices)

Exit codes: 0 success, 1 configuration/usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
import time

from .bounds import PreconditionError
from .config import ConfigError, bundled_example_path, parse_system_config
from .experiment import ExperimentConfig, run_pipeline, run_sweep
from .linalg import NumericalError
from .samples import eta_sampled
from .solver import SolverConfig, certificate_report, solve_sampled
from .special import DomainError
from .system import draw_observations
from .whitebox import cjsr_lower_bruteforce, whitebox_gamma


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; reserve 2 for
    numerical failures and report usage problems as config errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_config(p):
    p.add_argument("--config", default=None,
                   help="system file (default: the bundled example system)")


def _config_path(args) -> str:
    return args.config if args.config else str(bundled_example_path())


def _solver_config(args) -> SolverConfig:
    kw = {}
    if getattr(args, "box_cap", None) is not None:
        kw["C"] = args.box_cap
    if getattr(args, "tol_gamma", None) is not None:
        kw["tol_gamma"] = args.tol_gamma
    return SolverConfig(**kw)


def _print_report(report, stream) -> None:
    for name in ("N", "gamma_hat", "eta_hat", "beta", "beta_prime", "epsilon",
                 "epsilon_prime", "d_eps", "lower_bound_sdp", "lower_bound_cycles",
                 "upper_bound", "confidence_level", "degenerate",
                 "stability_certified"):
        value = getattr(report, name)
        if isinstance(value, float):
            value = repr(value)
        print(f"{name}: {value}", file=stream)


# --------------------------------------------------------------------------
# verbs
# --------------------------------------------------------------------------

def _cmd_validate(args) -> int:
    csls = parse_system_config(_config_path(args))
    aut = csls.automaton
    print(f"ok: {len(aut.nodes)} nodes, {len(aut.edges)} edges, "
          f"{aut.label_count} modes, dimension {csls.n}")
    return 0


def _cmd_sample(args) -> int:
    csls = parse_system_config(_config_path(args))
    samples = draw_observations(csls, args.samples, args.seed)
    if args.out:
        samples.to_csv(args.out)
        print(f"wrote {len(samples)} observations to {args.out}")
    else:
        samples.to_csv(sys.stdout)
    return 0


def _cmd_solve(args) -> int:
    csls = parse_system_config(_config_path(args))
    samples = draw_observations(csls, args.samples, args.seed)
    candidate = solve_sampled(samples, _solver_config(args))
    text = certificate_report(candidate, samples)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_bounds(args) -> int:
    cfg = ExperimentConfig(
        system_path=_config_path(args),
        N_list=(args.samples,),
        confidence_levels=(args.level,),
        seed=args.seed,
        solver=_solver_config(args),
        corollary_form=args.corollary_form,
        beta_share=args.beta_share,
        cycle_max_length=args.max_length,
    )
    report = run_pipeline(cfg, args.samples)
    if args.out:
        with open(args.out, "w") as fh:
            _print_report(report, fh)
    else:
        _print_report(report, sys.stdout)
    return 0


def _cmd_sweep(args) -> int:
    cfg = ExperimentConfig(
        system_path=_config_path(args),
        N_list=args.samples,
        confidence_levels=args.level,
        seed=args.seed,
        solver=_solver_config(args),
        out_dir=args.out,
        corollary_form=args.corollary_form,
        beta_share=args.beta_share,
        workers=args.workers,
        cycle_max_length=args.max_length,
        timing=args.timing,
    )
    result = run_sweep(cfg)
    print(f"wrote {result.csv_path}")
    print(f"wrote {result.plot_script_path}")
    print(f"wrote {result.svg_path}")
    print(f"wrote {result.summary_path}")
    return 0


def _cmd_whitebox(args) -> int:
    csls = parse_system_config(_config_path(args))
    t0 = time.perf_counter()
    gamma, P = whitebox_gamma(csls, args.grid, _solver_config(args))
    elapsed = time.perf_counter() - t0
    lower = gamma / math.sqrt(csls.n)
    print(f"gamma_certified: {gamma!r}")
    print(f"bracket: [{lower!r}, {gamma!r}]")
    if args.verbose:
        for u in sorted(P):
            print(f"node {u}:")
            for row in P[u]:
                print("    [" + ", ".join(repr(float(v)) for v in row) + "]")
        print(f"elapsed_s: {elapsed:.2f}")
    return 0


def _cmd_cycles(args) -> int:
    csls = parse_system_config(_config_path(args))
    value = cjsr_lower_bruteforce(csls, args.max_length)
    print(f"lower_bound_cycles: {value!r}")
    return 0


def _parser() -> _Parser:
    p = _Parser(prog="cslscert",
                description="Growth-rate certificates for constrained switching "
                            "linear systems from sampled observations.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check a system file")
    _add_config(v)
    v.set_defaults(func=_cmd_validate)

    s = sub.add_parser("sample", help="draw seeded observations")
    _add_config(s)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--samples", type=int, required=True, help="number of observations")
    s.add_argument("--out", default=None, help="CSV path (default: stdout)")
    s.set_defaults(func=_cmd_sample)

    so = sub.add_parser("solve", help="fit quadratic forms to sampled observations")
    _add_config(so)
    so.add_argument("--seed", type=int, default=0)
    so.add_argument("--samples", type=int, required=True)
    so.add_argument("--out", default=None, help="certificate path (default: stdout)")
    so.add_argument("--box-cap", type=float, default=None, help="spectral box upper end")
    so.add_argument("--tol-gamma", type=float, default=None, help="bisection tolerance")
    so.set_defaults(func=_cmd_solve)

    b = sub.add_parser("bounds", help="sample, solve, and bound at one level")
    _add_config(b)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--samples", type=int, required=True)
    b.add_argument("--level", type=float, default=0.95,
                   help="combined confidence level in (0, 1)")
    b.add_argument("--corollary-form", action="store_true",
                   help="alternate cap argument in the norm bound")
    b.add_argument("--beta-share", type=float, default=0.5,
                   help="fraction of the confidence slack spent on the sensitivity bound")
    b.add_argument("--max-length", type=int, default=8,
                   help="cycle length cap for the lower bound column (0 disables)")
    b.add_argument("--out", default=None)
    b.add_argument("--box-cap", type=float, default=None)
    b.add_argument("--tol-gamma", type=float, default=None)
    b.set_defaults(func=_cmd_bounds)

    w = sub.add_parser("sweep", help="bound curves over an N grid")
    _add_config(w)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--samples", type=_int_list, required=True,
                   help="comma-separated ascending N values")
    w.add_argument("--level", type=_float_list, default=(0.95, 0.98, 0.99),
                   help="comma-separated confidence levels")
    w.add_argument("--out", default="sweep-out", help="output directory")
    w.add_argument("--corollary-form", action="store_true")
    w.add_argument("--beta-share", type=float, default=0.5)
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("--max-length", type=int, default=8)
    w.add_argument("--timing", action="store_true",
                   help="record wall-clock per point (breaks byte determinism)")
    w.add_argument("--box-cap", type=float, default=None)
    w.add_argument("--tol-gamma", type=float, default=None)
    w.set_defaults(func=_cmd_sweep)

    wb = sub.add_parser("whitebox", help="exactly certified bracket from the matrices")
    _add_config(wb)
    wb.add_argument("--grid", type=int, default=720, help="sphere grid density")
    wb.add_argument("--verbose", action="store_true", help="print the forms")
    wb.add_argument("--box-cap", type=float, default=None)
    wb.add_argument("--tol-gamma", type=float, default=None)
    wb.set_defaults(func=_cmd_whitebox)

    c = sub.add_parser("cycles", help="brute-force cycle lower bound")
    _add_config(c)
    c.add_argument("--max-length", type=int, default=8)
    c.set_defaults(func=_cmd_cycles)

    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, DomainError, PreconditionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
