"""Command line front end.

    tallcol solve  --bc clamped --out run/
    tallcol verify --profile run/
    tallcol sweep  --bc clamped --deltas -1e-3,-1e-4,-1e-5

Exit codes: 0 success, 1 numerical or check failure, 2 I/O or usage error.
"""
import argparse
import logging
import re
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__, formats, kernels
from .dynamics import BoundaryKind
from .oracle import (
    DiscreteShape,
    bump_direction,
    optimality_residual,
    stationarity_check,
    sturm_liouville_lambda,
    torque_residual,
)
from .reconstruct import profile, volume
from .shooting import NoCrossing, ShootingError, ShootingOptions, integrate_backward, lambda_sensitivity, richardson_extrapolate

log = logging.getLogger("tallcol")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# verify thresholds
VOLUME_TOL = 1e-3
ORACLE_REL_TOL = 1e-2
ORACLE_POINTS = 2000
OPTIMALITY_TOL = 1e-2
TORQUE_TOL = 1e-3
STATIONARITY_TOL = 1e-2
STATIONARITY_EPS = 1e-3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    bc: str = BoundaryKind.CLAMPED.value
    delta: float = -1e-4
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    points: int = 400
    s_floor: float = 1e-3
    out: str = "."
    format: str = "csv"

    def __post_init__(self):
        if self.points < 2:
            raise UsageError("--points must be at least 2")
        if not 0 < self.s_floor < 1:
            raise UsageError("--s-floor must lie in (0, 1)")
        try:
            self.shooting_options()
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def shooting_options(self, delta=None):
        return ShootingOptions(delta=self.delta if delta is None else delta, rel_tol=self.rel_tol, abs_tol=self.abs_tol)

    def provenance(self):
        """Everything that determines the numbers, but not where they go."""
        cfg = {k: v for k, v in asdict(self).items() if k not in ("command", "out")}
        cfg.update(asdict(self.shooting_options()))
        cfg["backend"] = kernels.active()
        cfg["version"] = __version__
        return cfg


def _floats(text):
    try:
        values = [float(x) for x in text.replace(" ", ",").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None
    return values


def _parser():
    p = argparse.ArgumentParser(prog="tallcol", description="Tallest self-supporting column.")
    # accept "--delta -1e-4" as well as "--delta=-1e-4"
    p._negative_number_matcher = re.compile(r"^-(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?(,.*)?$")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, delta=True, output=True):
        sp._negative_number_matcher = p._negative_number_matcher
        sp.add_argument("--bc", choices=[b.value for b in BoundaryKind], default=None)
        if delta:
            sp.add_argument("--delta", type=float, default=-1e-4)
        sp.add_argument("--rel-tol", type=float, default=1e-8)
        sp.add_argument("--abs-tol", type=float, default=1e-10)
        sp.add_argument("--points", type=int, default=400)
        sp.add_argument("--s-floor", type=float, default=1e-3)
        if output:
            sp.add_argument("--out", default=".")
            sp.add_argument("--format", choices=["csv", "json"], default="csv")

    common(sub.add_parser("solve", help="shoot for the optimum and write its profile"))
    v = sub.add_parser("verify", help="check a profile against the independent eigenvalue oracle")
    common(v, output=False)
    v.add_argument("--profile", default=None, help="summary.json, a run directory or a JSON profile")
    s = sub.add_parser("sweep", help="lambda over several delta, with extrapolation")
    common(s, delta=False, output=False)
    s.add_argument("--deltas", type=_floats, required=True, help="comma separated, one sign")
    s.add_argument("--out", default=None, help="CSV file for the table (default: stdout)")
    return p


def _config(args):
    return RunConfig(
        command=args.command,
        bc=args.bc or BoundaryKind.CLAMPED.value,
        delta=getattr(args, "delta", -1e-4),
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        points=args.points,
        s_floor=args.s_floor,
        out=getattr(args, "out", None) or ".",
        format=getattr(args, "format", "csv"),
    )


def _solve(cfg):
    sol = integrate_backward(cfg.bc, cfg.shooting_options())
    return sol, profile(sol, cfg.points, cfg.s_floor)


def cmd_solve(cfg, stdout=None):
    stdout = stdout or sys.stdout
    sol, prof = _solve(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    prof_name = f"profile.{cfg.format}"
    if cfg.format == "csv":
        formats.write_profile_csv(out / prof_name, prof)
    else:
        formats.write_profile_json(out / prof_name, prof)
    formats.write_trajectory_csv(out / "trajectory.csv", sol)
    summary = {
        "bc": sol.bc.value,
        "lambda": sol.lam,
        "delta": sol.delta,
        "t_stop": sol.t_stop,
        "volume": volume(prof),
        "rel_tol": cfg.rel_tol,
        "meta": prof.meta,
        "config": cfg.provenance(),
        "files": {"profile": prof_name, "trajectory": "trajectory.csv"},
    }
    formats.write_summary(out / formats.SUMMARY_NAME, summary)
    print(f"lambda  = {sol.lam:.6g}", file=stdout)
    print(f"delta_t = {sol.t_stop:.6g}", file=stdout)
    return EXIT_OK


def run_checks(prof, oracle_points=ORACLE_POINTS):
    """``[(name, value, threshold, passed)]`` for a profile of an optimum."""
    checks = []

    def add(name, value, threshold):
        checks.append((name, float(value), threshold, bool(np.isfinite(value) and value < threshold)))

    add("volume |V - 1|", abs(volume(prof) - 1.0), VOLUME_TOL)
    try:
        shape = DiscreteShape.from_profile(prof, oracle_points, prof.s_min)
        lam_oracle = sturm_liouville_lambda(shape, prof.bc)
        add("oracle |lam_o - lam| / lam", abs(lam_oracle - prof.lam) / prof.lam, ORACLE_REL_TOL)
        try:
            d = stationarity_check(shape, prof.bc, bump_direction, STATIONARITY_EPS)
            add("stationarity |dlam| / lam", abs(d) / lam_oracle, STATIONARITY_TOL)
        except ValueError as exc:
            log.warning("stationarity not evaluated: %s", exc)
            add("stationarity |dlam| / lam", np.inf, STATIONARITY_TOL)
    except (ValueError, ArithmeticError) as exc:
        log.warning("oracle failed: %s", exc)
        add("oracle |lam_o - lam| / lam", np.inf, ORACLE_REL_TOL)
        add("stationarity |dlam| / lam", np.inf, STATIONARITY_TOL)
    add("optimality residual", optimality_residual(prof), OPTIMALITY_TOL)
    add("torque residual", torque_residual(prof), TORQUE_TOL)
    return checks


def cmd_verify(cfg, profile_path=None, bc_given=False, stdout=None):
    stdout = stdout or sys.stdout
    if profile_path is None:
        prof = _solve(cfg)[1]
    else:
        try:
            prof, _ = formats.load_profile(profile_path)
        except (formats.FormatError, KeyError, ValueError) as exc:
            raise UsageError(f"cannot read profile: {exc}") from None
        if bc_given and prof.bc.value != cfg.bc:
            raise UsageError(f"--bc {cfg.bc} does not match the profile's base condition {prof.bc.value}")
    checks = run_checks(prof)
    print(f"{prof.bc.value} profile, lambda = {prof.lam:.6g}", file=stdout)
    for name, value, threshold, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name:28s} {value:.3e}  (< {threshold:g})", file=stdout)
    return EXIT_OK if all(c[3] for c in checks) else EXIT_FAIL


def cmd_sweep(cfg, deltas, out=None, stdout=None):
    stdout = stdout or sys.stdout
    if not deltas:
        raise UsageError("--deltas is empty")
    try:
        results = lambda_sensitivity(cfg.bc, deltas, cfg.shooting_options(delta=deltas[0]))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lines = ["delta,lambda"]
    good = []
    for d, res in results:
        if isinstance(res, ShootingError):
            log.warning("delta=%g failed: %s", d, res)
            lines.append(f"{d!r},nan")
        else:
            lines.append(f"{d!r},{res!r}")
            good.append((d, res))
    table = "\n".join(lines) + "\n"
    if out is None:
        stdout.write(table)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(table)
    if not good:
        print("no run reached the base", file=sys.stderr)
        return EXIT_FAIL
    limit, order = richardson_extrapolate(*zip(*good))
    order_text = "n/a" if order is None else f"{order:.3g}"
    print(f"extrapolated lambda = {limit:.10g} (order {order_text})", file=stdout)
    return EXIT_OK if len(good) == len(results) else EXIT_FAIL


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _config(args)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.profile, bc_given=args.bc is not None)
        return cmd_sweep(cfg, args.deltas, args.out)
    except UsageError as exc:
        print(f"tallcol: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoCrossing as exc:
        print(f"tallcol: {exc}", file=sys.stderr)
        if cfg.delta > 0:
            print("hint: try negating --delta", file=sys.stderr)
        return EXIT_FAIL
    except ShootingError as exc:
        print(f"tallcol: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"tallcol: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
