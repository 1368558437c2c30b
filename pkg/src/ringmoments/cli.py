"""Command-line interface.

Commands: wg, entry-moment, exact-moment, verify-lemmas, mc-moment,
spectrum-experiment.  Exit codes: 0 on success, 1 when a computation or an
internal cross-check fails, 2 on usage errors (argparse's convention).

Profiles are given as one of
  * an inline comma list of rationals:        1,2,3  or  0.5,2,7/2
  * a deterministic grid:                     uniform:LO:HI:N
  * a file reference:                         file:PATH  (one value per line)

Output files land in --out when given, else in $RINGMOMENTS_OUTPUT_DIR, else
in the working directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .exact_moments import (
    BudgetExceededError,
    CrossCheckError,
    composition_census,
    theorem_bound,
    trace_moment_sq,
    trace_moment_uu,
    verify_counting_lemma,
)
from .haar_moments import MomentSpec, entry_moment, mc_entry_moment
from .montecarlo import (
    EigensolverError,
    ExperimentRecord,
    ProfileFamily,
    estimate_trace_moment,
    radius_rate_experiment,
    tail_experiment,
    write_records_csv,
    write_records_jsonl,
)
from .permutations import Permutation
from .profiles import SingularProfile
from .weingarten import wg_alt_bounds, wg_bound, wg_exact, wg_series

OUTPUT_DIR_ENV = "RINGMOMENTS_OUTPUT_DIR"


def parse_profile(text: str) -> SingularProfile:
    """Parse a profile argument; see module docstring for the grammar."""
    if text.startswith("uniform:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"expected uniform:LO:HI:N, got {text!r}")
        lo, hi = Fraction(parts[1]), Fraction(parts[2])
        return SingularProfile.uniform_grid(lo, hi, int(parts[3]))
    if text.startswith("file:"):
        lines = Path(text[5:]).read_text().split()
        return SingularProfile(tuple(Fraction(tok) for tok in lines))
    return SingularProfile(tuple(Fraction(tok) for tok in text.split(",")))


def _out_dir(args) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    return Path(os.environ.get(OUTPUT_DIR_ENV, "."))


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(","))


def _cmd_wg(args) -> int:
    pi = Permutation.from_cycle_string(args.pi, args.k)
    exact = wg_exact(args.k, args.n, pi)
    series = wg_series(args.k, args.n, pi, args.r_max)
    print(f"pi = {pi}  cycle type = {pi.cycle_type()}")
    print(f"exact = {exact}")
    tail = "unbounded (k^2 >= 2n)" if series.tail_bound is None else str(series.tail_bound)
    print(f"series partial (r_max={series.r_max}) = {series.series_partial}")
    print(f"series tail bound = {tail}")
    if args.k * args.k < 2 * args.n:
        bound = wg_bound(args.k, args.n, pi)
        print(f"magnitude bound = {bound.value}  ({bound.case})")
        print(f"|exact| <= bound: {abs(exact) <= bound.value}")
    else:
        print("magnitude bound = not applicable (k^2 >= 2n)")
    alt = wg_alt_bounds(args.k, args.n, pi, args.j)
    print(
        f"alt bounds (j={args.j}): power = {alt.power_bound}  "
        f"catalan = {alt.catalan_bound}"
    )
    return 0


def _cmd_entry_moment(args) -> int:
    spec = MomentSpec(
        n=args.n,
        rows=_parse_int_list(args.rows),
        cols=_parse_int_list(args.cols),
        conj_rows=_parse_int_list(args.conj_rows),
        conj_cols=_parse_int_list(args.conj_cols),
    )
    exact = entry_moment(spec)
    print(f"entry moment = {exact}")
    if args.mc_samples:
        est = mc_entry_moment(spec, args.mc_samples, args.seed)
        print(f"mc mean = {est.mean!r}  std error = {est.std_error!r}")
        if est.std_error > 0:
            sigma = abs(est.mean - float(exact)) / est.std_error
            print(f"deviation = {sigma:.2f} standard errors")
    return 0


def _cmd_exact_moment(args) -> int:
    profile = parse_profile(args.profile)
    report = theorem_bound(args.k, profile, args.mode, Fraction(args.epsilon))
    if report.exact_moment is None:
        if args.mode == "uu":
            trace_moment_uu(args.k, profile)  # surface the real error
        else:
            trace_moment_sq(args.k, profile)
        raise RuntimeError("moment unavailable")
    print(f"mode = {args.mode}  k = {args.k}  n = {profile.n}")
    print(f"exact moment = {report.exact_moment}")
    print(f"exact moment (float) = {float(report.exact_moment)!r}")
    print(f"bound core = {report.bound_core}")
    print(f"ratio = {report.ratio}  (float {float(report.ratio)!r})")
    print(f"small-order condition k^6 < (2 - eps) n: {report.applicable}")
    if args.census:
        census = composition_census(args.k, profile)
        names = ("L0", "L1", "L2", "L3", "L4", "L5")
        for name, link in zip(names, census.links):
            print(f"census {name} = {link}")
        print(f"census chain ok = {census.chain_ok}")
        print(f"census envelope value = {census.value}")
        if not census.chain_ok:
            raise CrossCheckError("census chain inequality violated")
    return 0


def _cmd_verify_lemmas(args) -> int:
    from .permutations import enumerate_sk0

    k = args.k
    failures = 0
    print(f"counting check at k = {k}: word distance census over "
          f"endpoint-fixing alpha, l1, l2")
    for alpha in enumerate_sk0(k):
        for l1 in range(1, k):
            for l2 in range(1, k):
                for q in range(0, k - 1):
                    chk = verify_counting_lemma(k, l1, l2, alpha, q)
                    status = "ok" if chk.ok else "VIOLATION"
                    if chk.count or not chk.ok:
                        print(
                            f"alpha={alpha} l1={l1} l2={l2} q={q} "
                            f"count={chk.count} bound={chk.bound} {status}"
                        )
                    if not chk.ok:
                        failures += 1
    n = args.n if args.n else max(k * k, k)
    if k * k < 2 * n:
        from .weingarten import wg_class_table

        table = wg_class_table(k, n)
        print(f"magnitude check at k = {k}, n = {n}:")
        for lam, value in table.items():
            pi = _class_rep(lam, k)
            bound = wg_bound(k, n, pi)
            ok = abs(value) <= bound.value
            print(f"class {lam}: |wg| = {abs(value)} <= {bound.value}: {ok}")
            if not ok:
                failures += 1
    if failures:
        raise CrossCheckError(f"{failures} bound violations")
    print("all checks passed")
    return 0


def _class_rep(lam, k) -> Permutation:
    from .weingarten import class_representative

    return class_representative(lam, k)


def _cmd_mc_moment(args) -> int:
    profile = parse_profile(args.profile)
    est = estimate_trace_moment(args.k, profile, args.samples, args.seed, args.mode)
    print(f"statistic = {est.statistic}  k = {args.k}  n = {profile.n}")
    print(f"mc mean = {est.mean!r}")
    print(f"mc std error = {est.std_error!r}")
    exact = None
    if args.compare_exact:
        exact = (
            trace_moment_uu(args.k, profile)
            if args.mode == "uu"
            else trace_moment_sq(args.k, profile)
        )
        print(f"exact = {exact}  (float {float(exact)!r})")
        if est.std_error > 0:
            sigma = abs(est.mean - float(exact)) / est.std_error
            print(f"deviation = {sigma:.2f} standard errors")
    if args.output:
        path = _out_dir(args) / args.output
        records = [
            ExperimentRecord(
                n=profile.n, k=args.k, seed=args.seed,
                stat=f"{est.statistic}_mean", value=est.mean,
                b=profile.b, a=profile.a,
                M=float(profile.M), m=float(profile.m),
            ),
            ExperimentRecord(
                n=profile.n, k=args.k, seed=args.seed,
                stat=f"{est.statistic}_stderr", value=est.std_error,
                b=profile.b, a=profile.a,
                M=float(profile.M), m=float(profile.m),
            ),
        ]
        if args.format == "csv":
            write_records_csv(records, str(path))
        else:
            write_records_jsonl(records, str(path))
        print(f"wrote {path}")
    return 0


def _cmd_spectrum_experiment(args) -> int:
    config = json.loads(Path(args.config).read_text())
    kind = config.get("experiment")
    seed = int(config.get("seed", 0))
    replications = int(config.get("replications", 16))
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    writer = write_records_csv if args.format == "csv" else write_records_jsonl
    suffix = "csv" if args.format == "csv" else "jsonl"
    if kind == "radius-rate":
        family_cfg = config["family"]
        family = ProfileFamily(
            kind=family_cfg["kind"],
            lo=float(family_cfg.get("lo", 1.0)),
            hi=float(family_cfg.get("hi", 1.0)),
        )
        n_grid = [int(n) for n in config["n_grid"]]
        records, fit = radius_rate_experiment(
            family, n_grid, replications, seed, args.jobs
        )
        records_path = out / f"radius_rate_records.{suffix}"
        writer(records, str(records_path))
        fit_path = out / "radius_rate_fit.json"
        fit_payload = {
            "slope": fit.slope,
            "stderr": fit.stderr,
            "ci_low": fit.ci_low,
            "ci_high": fit.ci_high,
            "medians": [[n, med] for n, med in fit.medians],
            "degenerate": fit.degenerate,
        }
        fit_path.write_text(json.dumps(fit_payload, sort_keys=True, indent=2) + "\n")
        print(f"median positive deviations: {list(fit.medians)}")
        print(f"fitted log-log slope = {fit.slope!r} (degenerate={fit.degenerate})")
        print(f"wrote {records_path}")
        print(f"wrote {fit_path}")
    elif kind == "tail":
        profile = parse_profile(config["profile"])
        n = int(config.get("n", profile.n))
        deltas = [float(d) for d in config["deltas"]]
        records, points = tail_experiment(
            profile, n, deltas, replications, seed, args.jobs
        )
        records_path = out / f"tail_records.{suffix}"
        writer(records, str(records_path))
        curve_path = out / "tail_curve.csv"
        with open(curve_path, "w", newline="") as fh:
            fh.write("delta,p_radius_above,p_min_below\n")
            for p in points:
                fh.write(f"{p.delta!r},{p.p_radius_above!r},{p.p_min_below!r}\n")
        for p in points:
            print(
                f"delta={p.delta!r}: P(radius > b + delta)={p.p_radius_above!r} "
                f"P(min < a - delta)={p.p_min_below!r}"
            )
        print(f"wrote {records_path}")
        print(f"wrote {curve_path}")
    else:
        raise ValueError(f"unknown experiment kind {kind!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringmoments",
        description="Exact Haar-unitary moment calculus and spectral experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wg", help="Weingarten value, series, and bounds")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pi", default="id", help="cycle notation, e.g. '(1 2)'")
    p.add_argument("--r-max", type=int, default=None)
    p.add_argument("--j", type=int, default=2)
    p.set_defaults(func=_cmd_wg)

    p = sub.add_parser("entry-moment", help="exact Haar entry moment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rows", required=True, help="comma list, e.g. 1,2")
    p.add_argument("--cols", required=True)
    p.add_argument("--conj-rows", required=True)
    p.add_argument("--conj-cols", required=True)
    p.add_argument("--mc-samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_entry_moment)

    p = sub.add_parser("exact-moment", help="exact trace moment and envelope")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--mode", choices=("uu", "sq"), default="uu")
    p.add_argument("--epsilon", default="1/2")
    p.add_argument("--census", action="store_true")
    p.set_defaults(func=_cmd_exact_moment)

    p = sub.add_parser("verify-lemmas", help="exhaustive bound verifications")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, default=0, help="dimension for the magnitude check")
    p.set_defaults(func=_cmd_verify_lemmas)

    p = sub.add_parser("mc-moment", help="Monte-Carlo trace moment")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("uu", "sq"), default="uu")
    p.add_argument("--compare-exact", action="store_true")
    p.add_argument("--output", default=None, help="records file name")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=_cmd_mc_moment)

    p = sub.add_parser("spectrum-experiment", help="extreme-eigenvalue experiments")
    p.add_argument("--config", required=True, help="JSON config path")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument(
        "--jobs", type=int, default=os.cpu_count() or 1,
        help="parallel worker count; results do not depend on it",
    )
    p.set_defaults(func=_cmd_spectrum_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CrossCheckError, BudgetExceededError, EigensolverError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        # bad parameter values or unreadable inputs are usage errors
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
