"""Command-line front end: validate configs, run allocators, sweep experiments.

Subcommands
-----------
validate   load a config file and print the derived per-UAV link constants
allocate   run one allocation algorithm on a single channel draw
outage     closed-form vs Monte-Carlo outage for one fixed allocation
fig3       K sweep of iteration counts and min-rates (CSV)
fig4       altitude x velocity sweep of outage probabilities (CSV)

Exit codes: 0 success, 2 config/domain/capability error, 3 numeric failure,
4 trend assertion failure.  The ``EHUAV_LOG`` environment variable sets the
logging level (e.g. ``EHUAV_LOG=INFO``).
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from typing import Sequence

import numpy as np

from .allocation import equal_bandwidth_taf
from .channel import LinkBudget, make_link_budget, sample_realization
from .configio import LoadedConfig, load_config
from .errors import (
    CapabilityError,
    ConfigError,
    DomainError,
    EhuavError,
    NumericError,
    TrendError,
)
from .experiments import (
    ALGORITHMS,
    ExperimentRow,
    ExperimentSpec,
    allocate_by_name,
    block_time,
    place_nodes,
    rap_fraction,
    run_iterations_and_minrate_sweep,
    run_outage_altitude_sweep,
    write_rows,
)
from .outage import Allocation, min_rate, outage_closed_form, outage_monte_carlo

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_TREND = 4


def _configure_logging() -> None:
    """Honour EHUAV_LOG (DEBUG/INFO/WARNING/...); default WARNING."""
    name = os.environ.get("EHUAV_LOG", "WARNING").strip().upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _budgets(loaded: LoadedConfig) -> list[LinkBudget]:
    net = loaded.network
    return [make_link_budget(k, net, geom) for k, geom in enumerate(place_nodes(net))]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    loaded = load_config(args.config)
    net = loaded.network
    T = block_time(net.V_hat, net.f_c, net.c_light)
    print(f"config OK: {args.config}")
    print(
        f"K={net.K}  B={net.B:g} Hz  f_c={net.f_c:g} Hz  "
        f"noise_power={net.noise_power:.6g} W  R_a={net.R_a:g} bps/Hz"
    )
    print(f"block_time={T:.6g} s at V_hat={net.V_hat:g} m/s")
    print(f"t_op={loaded.t_op:g} s per bisection operation")
    print(f"equal-bandwidth time split tau={equal_bandwidth_taf(net.K, net.R_a):.12g}")
    print("per-UAV link constants:")
    print(
        f"{'k':>3} {'d_h_m':>9} {'d_g_m':>9} {'alt_m':>8} "
        f"{'pl_h_db':>9} {'pl_g_db':>9} {'lam':>12} {'mu':>12} {'rho':>12}"
    )
    for k, geom in enumerate(place_nodes(net)):
        b = make_link_budget(k, net, geom)
        print(
            f"{k:>3} {geom.d_h:>9.3f} {geom.d_g:>9.3f} {geom.altitude:>8.2f} "
            f"{b.pl_h_db:>9.3f} {b.pl_g_db:>9.3f} "
            f"{b.lam:>12.5e} {b.mu:>12.5e} {b.rho:>12.5e}"
        )
    return EXIT_OK


def cmd_allocate(args: argparse.Namespace) -> int:
    loaded = load_config(args.config)
    net = loaded.network
    if args.gamma is not None:
        gamma = np.asarray(args.gamma, dtype=float)
        if gamma.shape != (net.K,):
            raise ConfigError(
                f"--gamma needs exactly K={net.K} values, got {gamma.size}"
            )
    else:
        rng = np.random.default_rng(args.seed)
        gamma = sample_realization(_budgets(loaded), net, rng).gamma
        print(f"channel draw: seed={args.seed}")

    res = allocate_by_name(args.algorithm, gamma, net)
    value, worst = min_rate(res.as_allocation(), gamma)
    T = block_time(net.V_hat, net.f_c, net.c_light)
    charged_ops = 0 if args.algorithm == "optimal" else res.op_count
    nu_r = rap_fraction(charged_ops, loaded.t_op, T)
    adjusted, _ = min_rate(res.as_allocation(nu_r=nu_r), gamma)

    print(f"algorithm: {args.algorithm}")
    print("gamma: " + " ".join(f"{g:.6g}" for g in gamma))
    print(f"tau: {res.tau:.12g}")
    print("beta: " + " ".join(f"{b:.12g}" for b in res.beta))
    print(
        f"iters_tau={res.iters_tau}  iters_beta={res.iters_beta}  "
        f"inner_iters_beta={res.inner_iters_beta}  op_count={res.op_count}"
    )
    print(f"min_rate_bpshz: {value:.12g} (worst UAV index {worst}, full block)")
    print(f"rap_fraction: {nu_r:.6g}  min_rate_with_rap_bpshz: {adjusted:.12g}")
    return EXIT_OK


def cmd_outage(args: argparse.Namespace) -> int:
    loaded = load_config(args.config)
    net = loaded.network
    K = net.K
    if args.beta is not None:
        if len(args.beta) != K:
            raise ConfigError(
                f"--beta needs exactly K={K} values, got {len(args.beta)}"
            )
        beta = tuple(float(b) for b in args.beta)
    else:
        beta = (1.0 / K,) * K
    tau = args.tau if args.tau is not None else equal_bandwidth_taf(K, net.R_a)
    alloc = Allocation(tau=tau, beta=beta)
    budgets = _budgets(loaded)

    analytic = outage_closed_form(alloc, budgets, net, rate_requirement=args.rate)
    est = outage_monte_carlo(
        alloc,
        budgets,
        net,
        trials=args.trials,
        seed=args.seed,
        rate_requirement=args.rate,
        threads=args.threads,
    )
    # Band width from the analytic probability: the empirical standard error
    # degenerates to 0 whenever the estimate saturates at 0 or 1.
    band = 3.0 * math.sqrt(analytic * (1.0 - analytic) / args.trials)
    diff = abs(est.p_out - analytic)
    verdict = "PASS" if diff <= band else "FAIL"

    print(f"tau: {alloc.tau:.12g}")
    print("beta: " + " ".join(f"{b:.12g}" for b in alloc.beta))
    print(f"analytic_outage: {analytic:.12g}")
    print(
        f"empirical_outage: {est.p_out:.12g} "
        f"(trials={est.trials}, std_err={est.std_err:.6g})"
    )
    print(f"abs_difference: {diff:.6g}  three_sigma_band: {band:.6g}")
    print(f"verdict: {verdict}")
    return EXIT_OK


def fig3_trend_failures(rows: Sequence[ExperimentRow]) -> list[str]:
    """Iteration ordering and min-rate ordering across the K sweep.

    Diagnostic rows (all-None metrics) are skipped: an algorithm that could
    not run at some K simply drops out of the comparisons there.
    """
    failures: list[str] = []
    by_value: dict[float, dict[str, ExperimentRow]] = {}
    for row in rows:
        if row.mean_iters is None:
            continue
        by_value.setdefault(row.sweep_value, {})[row.algorithm] = row
    for value in sorted(by_value):
        here = by_value[value]
        prop, conv = here.get("proposed"), here.get("conventional")
        equal = here.get("equal_bandwidth")
        if prop and conv and not prop.mean_iters < conv.mean_iters:
            failures.append(
                f"K={value:g}: mean iterations proposed={prop.mean_iters:.6g} "
                f"not below conventional={conv.mean_iters:.6g}"
            )
        if prop and conv and not prop.mean_min_rate_bpshz >= conv.mean_min_rate_bpshz:
            failures.append(
                f"K={value:g}: mean min-rate proposed={prop.mean_min_rate_bpshz:.6g} "
                f"below conventional={conv.mean_min_rate_bpshz:.6g}"
            )
        if conv and equal and not conv.mean_min_rate_bpshz >= equal.mean_min_rate_bpshz:
            failures.append(
                f"K={value:g}: mean min-rate conventional="
                f"{conv.mean_min_rate_bpshz:.6g} below "
                f"equal-bandwidth={equal.mean_min_rate_bpshz:.6g}"
            )
    return failures


def fig4_trend_failures(rows: Sequence[ExperimentRow]) -> list[str]:
    """Assertion-tagged trends of the altitude x velocity outage sweep.

    1. analytic vs empirical equal-bandwidth within 3 standard errors
       (band from the analytic probability) at every altitude/velocity;
    2. equal-bandwidth empirical outage identical across velocities
       (zero iterations charged, so the block time cannot matter);
    3. at the altitude nearest 90 m, the conventional-minus-proposed
       outage gap is non-decreasing in velocity;
    4. the analytic equal-bandwidth curve has a unique interior minimum
       at an altitude in [70, 110] m.
    """
    failures: list[str] = []
    analytic: dict[float, ExperimentRow] = {}
    empirical: dict[float, dict[str, ExperimentRow]] = {}
    for row in rows:
        if row.algorithm == "equal_bandwidth_analytic":
            analytic[row.sweep_value] = row
        elif row.outage_empirical is not None:
            empirical.setdefault(row.sweep_value, {})[row.algorithm] = row

    for altitude in sorted(analytic):
        p = analytic[altitude].outage_analytic
        for label, row in sorted(empirical.get(altitude, {}).items()):
            if not label.startswith("equal_bandwidth@"):
                continue
            band = 3.0 * math.sqrt(p * (1.0 - p) / row.trials)
            if abs(row.outage_empirical - p) > band:
                failures.append(
                    f"altitude={altitude:g} {label}: empirical outage "
                    f"{row.outage_empirical:.6g} misses analytic {p:.6g} "
                    f"by more than {band:.6g}"
                )

    for altitude in sorted(empirical):
        equal_values = {
            label: row.outage_empirical
            for label, row in empirical[altitude].items()
            if label.startswith("equal_bandwidth@")
        }
        if len(set(equal_values.values())) > 1:
            failures.append(
                f"altitude={altitude:g}: equal-bandwidth outage varies with "
                f"velocity: {equal_values}"
            )

    def velocity_of(label: str) -> float:
        return float(label.rsplit("@v", 1)[1])

    if empirical:
        pivot = min(empirical, key=lambda alt: abs(alt - 90.0))
        gaps: list[tuple[float, float]] = []
        here = empirical[pivot]
        velocities = sorted(
            {velocity_of(lbl) for lbl in here if lbl.startswith("proposed@")}
        )
        for v in velocities:
            prop = here.get(f"proposed@v{v:g}")
            conv = here.get(f"conventional@v{v:g}")
            if prop and conv:
                gaps.append((v, conv.outage_empirical - prop.outage_empirical))
        for (v0, g0), (v1, g1) in zip(gaps, gaps[1:]):
            if g1 < g0:
                failures.append(
                    f"altitude={pivot:g}: conventional-proposed outage gap "
                    f"shrinks from {g0:.6g} at v={v0:g} to {g1:.6g} at v={v1:g}"
                )

    if len(analytic) >= 3:
        altitudes = sorted(analytic)
        curve = [analytic[a].outage_analytic for a in altitudes]
        best = min(curve)
        argmins = [i for i, p in enumerate(curve) if p == best]
        if len(argmins) != 1:
            failures.append(
                "analytic equal-bandwidth curve has no unique minimum "
                f"(tied at altitudes {[altitudes[i] for i in argmins]})"
            )
        else:
            i = argmins[0]
            if i == 0 or i == len(curve) - 1:
                failures.append(
                    f"analytic equal-bandwidth minimum sits on the sweep "
                    f"boundary at {altitudes[i]:g} m"
                )
            elif not 70.0 <= altitudes[i] <= 110.0:
                failures.append(
                    f"analytic equal-bandwidth minimum at {altitudes[i]:g} m "
                    "lies outside [70, 110] m"
                )
    return failures


def _finish_sweep(rows: Sequence[ExperimentRow], out: str, failures: list[str]) -> int:
    """Write the CSV first so the data survives a failed trend check."""
    write_rows(list(rows), out)
    print(f"wrote {len(rows)} rows to {out}")
    if failures:
        raise TrendError("\n".join(failures))
    print("trend checks OK")
    return EXIT_OK


def cmd_fig3(args: argparse.Namespace) -> int:
    loaded = load_config(args.config)
    spec = ExperimentSpec(
        scenario=loaded.network,
        sweep_param="K",
        sweep_values=loaded.k_values,
        trials=loaded.trials,
        seed=loaded.seed,
        algorithms=loaded.algorithms,
        t_op=loaded.t_op,
    )
    rows = run_iterations_and_minrate_sweep(spec)
    return _finish_sweep(rows, args.out, fig3_trend_failures(rows))


def cmd_fig4(args: argparse.Namespace) -> int:
    loaded = load_config(args.config)
    spec = ExperimentSpec(
        scenario=loaded.network,
        sweep_param="altitude",
        sweep_values=loaded.altitudes,
        trials=loaded.trials,
        seed=loaded.seed,
        algorithms=loaded.algorithms,
        velocities=loaded.velocities,
        t_op=loaded.t_op,
    )
    rows = run_outage_altitude_sweep(spec)
    return _finish_sweep(rows, args.out, fig4_trend_failures(rows))


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ehuav",
        description="Time/bandwidth allocation and outage analysis for "
        "energy-harvesting UAV identification networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a config file, print derived constants")
    p.add_argument("config", help="path to the scenario config file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("allocate", help="run one allocator on a single channel draw")
    p.add_argument("config", help="path to the scenario config file")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--gamma",
        type=float,
        nargs="+",
        metavar="G",
        help="composite channel gains, one per UAV",
    )
    source.add_argument(
        "--seed", type=int, help="draw the gains from the scenario instead"
    )
    p.add_argument("--algorithm", choices=ALGORITHMS, default="proposed")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser(
        "outage", help="closed-form vs Monte-Carlo outage for one allocation"
    )
    p.add_argument("config", help="path to the scenario config file")
    p.add_argument("--tau", type=float, help="time split (default: closed form)")
    p.add_argument(
        "--beta",
        type=float,
        nargs="+",
        metavar="B",
        help="bandwidth shares (default: equal split)",
    )
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument(
        "--rate",
        type=float,
        default=None,
        help="override the rate requirement for this run (0 is allowed here)",
    )
    p.add_argument(
        "--threads",
        type=int,
        default=None,
        help="sampler worker threads; never changes the output",
    )
    p.set_defaults(func=cmd_outage)

    p = sub.add_parser(
        "fig3", help="K sweep: iteration counts and min-rates per algorithm"
    )
    p.add_argument("config", help="path to the scenario config file")
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_fig3)

    p = sub.add_parser("fig4", help="altitude x velocity sweep: outage probabilities")
    p.add_argument("config", help="path to the scenario config file")
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_fig4)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TrendError as exc:
        print(f"error: trend assertion failed:\n{exc}", file=sys.stderr)
        return EXIT_TREND
    except NumericError as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, DomainError, CapabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EhuavError as exc:  # safety net for future subclasses
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
