"""Command-line interface.

Subcommands: predict (analytic constants and regime), simulate (seeded
ensemble summary), exact (finite-n oracle tables), experiment (limit-theorem
checks with PASS/FAIL gates).

Exit codes: 0 success / all gates pass, 1 an experiment gate failed,
2 usage or domain error. Flags beat the config file, which beats defaults;
the config file is plain `key = value` lines with `#` comments, keys named
like the long options (p, q, r, theta, steps, trajectories, seed, ...).
"""

import argparse
import math
import sys

import numpy as np

from . import experiments
from .analytic import regime_prediction, v_limit_superdiffusive
from .errors import Degenerate, LapsewalkError
from .exact import DP_CAP_DEFAULT, distribution_dp, exact_moments
from .model import ModelParams, Regime, derive_constants
from .report import base_report, csv_lines, emit_json, fmt_float
from .stats import normal_cdf
from .svg import line_plot

EXPERIMENT_KINDS = ("lln", "clt", "critical", "superdiffusive",
                    "regime-scan", "lil-diagnostic")

# key -> (default, type); config-file values are parsed with the type
OPTION_TABLE = {
    "p": (0.6, float), "q": (0.2, float), "r": (0.2, float),
    "theta": (0.5, float),
    "steps": (10000, int), "trajectories": (1000, int), "seed": (0, int),
    "workers": (1, int), "horizon_factor": (16, int),
    "dp_cap": (DP_CAP_DEFAULT, int), "n_max": (1 << 20, int),
    "format": (None, str), "snapshots": (None, str), "gate": (None, float),
    "alphas": ("0.1,0.25,0.5,0.75", str),
}


def _parse_config_file(path):
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise LapsewalkError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _resolve(args):
    """flags > config file > defaults"""
    config = _parse_config_file(args.config) if getattr(args, "config", None) else {}
    resolved = {}
    for key, (default, typ) in OPTION_TABLE.items():
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
        elif key in config:
            resolved[key] = typ(config[key])
        else:
            resolved[key] = default
    return resolved


def _params_from(resolved) -> ModelParams:
    return ModelParams(resolved["p"], resolved["q"], resolved["r"],
                       resolved["theta"])


def _parse_snapshots(text):
    if text is None or text == "dyadic":
        return None
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _emit_csv_text(header, rows):
    return "\r\n".join(csv_lines(header, rows)) + "\r\n"


def _add_param_flags(sp):
    sp.add_argument("-p", type=float, default=None, help="probability of a +1-type step")
    sp.add_argument("-q", type=float, default=None, help="probability of a -1-type step")
    sp.add_argument("-r", type=float, default=None, help="probability of a delay (0 step)")
    sp.add_argument("--theta", type=float, default=None,
                    help="memory probability in [0, 1)")
    sp.add_argument("--config", default=None, help="key = value config file")
    sp.add_argument("--output", "-o", default=None, help="output path (default stdout)")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="lapsewalk",
        description="Elephant random walk with delays and memory lapses: "
                    "predictions, simulation, exact oracles, experiments.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("predict", help="derived constants, regime, limit predictions")
    _add_param_flags(sp)
    sp.add_argument("--format", choices=("text", "json"), default=None)

    sp = sub.add_parser("simulate", help="seeded ensemble summary at snapshot times")
    _add_param_flags(sp)
    sp.add_argument("-n", "--steps", type=int, default=None)
    sp.add_argument("-t", "--trajectories", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None, help="master seed")
    sp.add_argument("--snapshots", default=None,
                    help="comma-separated times, or 'dyadic' (default)")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--format", choices=("csv", "json"), default=None)

    sp = sub.add_parser("exact", help="exact moments (and optionally the full law)")
    _add_param_flags(sp)
    sp.add_argument("-n", "--steps", type=int, default=None)
    sp.add_argument("--distribution", action="store_true",
                    help="emit the full (s, z) mass table at n (DP, capped)")
    sp.add_argument("--dp-cap", dest="dp_cap", type=int, default=None)
    sp.add_argument("--format", choices=("csv", "json"), default=None)

    sp = sub.add_parser("experiment", help="limit-theorem checks with PASS/FAIL gates")
    sp.add_argument("kind", choices=EXPERIMENT_KINDS)
    _add_param_flags(sp)
    sp.add_argument("-n", "--steps", type=int, default=None)
    sp.add_argument("-t", "--trajectories", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--snapshots", default=None)
    sp.add_argument("--gate", type=float, default=None,
                    help="KS gate override for clt/critical/superdiffusive")
    sp.add_argument("--horizon-factor", dest="horizon_factor", type=int,
                    default=None, help="far-horizon multiple for the W proxy (>= 16)")
    sp.add_argument("--alphas", default=None,
                    help="comma list of alpha values for regime-scan")
    sp.add_argument("--n-max", dest="n_max", type=int, default=None,
                    help="horizon for regime-scan / lil-diagnostic")
    sp.add_argument("--csv", default=None, help="also write a per-snapshot CSV table")
    sp.add_argument("--plot", default=None, help="also write an SVG plot")
    return ap


def cmd_predict(resolved, output, fmt):
    params = _params_from(resolved)
    c = derive_constants(params)
    pred = regime_prediction(params)  # raises OutOfDomain for alpha < 0
    if pred.degenerate:
        raise Degenerate("phi = 0: variance predictions are degenerate")
    if c.regime is Regime.DIFFUSIVE:
        vn_asymptote = (f"v_n ~ Gamma(alpha+1)^2 n^(1-2 alpha)/(1-2 alpha)"
                        f" [exponent {1 - 2 * c.alpha:.6g}]")
    elif c.regime is Regime.CRITICAL:
        vn_asymptote = "v_n ~ (pi/4) log n"
    else:
        vn_asymptote = "v_n converges"
    report = base_report(
        "predict",
        params={"p": params.p, "q": params.q, "r": params.r, "theta": params.theta},
        derived={"alpha": c.alpha, "omega": c.omega, "tau": c.tau,
                 "gamma": c.gamma, "phi": c.phi, "beta": c.beta,
                 "psi": c.psi, "regime": c.regime.value},
        predictions={
            "lln_limit": pred.lln_limit,
            "z_lln_limit": pred.z_lln_limit,
            "variance_scale": pred.scale_formula,
            "variance_scale_at_1e6": pred.variance_scale(10 ** 6),
            "v_n_asymptote": vn_asymptote,
        },
    )
    if c.regime is Regime.SUPERDIFFUSIVE:
        report["predictions"]["v_limit"] = v_limit_superdiffusive(c.alpha, 1e-10)
        report["predictions"]["residual_scale"] = pred.residual_scale(10 ** 6)
    if fmt == "json":
        _write_text(output, emit_json(report))
    else:
        lines = [f"regime = {c.regime.value}"]
        for key in ("alpha", "omega", "tau", "gamma", "phi", "beta", "psi"):
            lines.append(f"{key} = {fmt_float(report['derived'][key])}")
        for key, val in report["predictions"].items():
            lines.append(f"{key} = {val if isinstance(val, str) else fmt_float(val)}")
        _write_text(output, "\n".join(lines) + "\n")
    return 0


def cmd_simulate(resolved, output, fmt):
    params = _params_from(resolved)
    snaps = _parse_snapshots(resolved["snapshots"])
    rep = experiments.simulate_report(
        params, resolved["steps"], resolved["trajectories"], resolved["seed"],
        snapshots=snaps, workers=resolved["workers"],
    )
    rep = base_report("simulate", **{k: v for k, v in rep.items() if k != "kind"})
    if fmt == "json":
        _write_text(output, emit_json(rep))
    else:
        rows = rep["results"]["snapshots"]
        header = list(rows[0].keys())
        _write_text(output, _emit_csv_text(header, [[row[h] for h in header]
                                                    for row in rows]))
    return 0


def cmd_exact(resolved, output, fmt, with_distribution):
    params = _params_from(resolved)
    n = resolved["steps"]
    pred = regime_prediction(params)
    table = exact_moments(params, n)
    ns = [int(m) for m in np.unique(np.concatenate(
        [np.array([1, n]), np.array([2 ** k for k in range(4, 25) if 2 ** k < n])]
    ))]
    rows = []
    for m in ns:
        scale = pred.variance_scale(m) if m > 1 else None
        var = float(table.var_s[m])
        rows.append({
            "n": m,
            "mean_s": float(table.mean_s[m]),
            "var_s": var,
            "mean_z": float(table.mean_z[m]),
            "mean_sz": float(table.mean_sz[m]),
            "predicted_scale": scale,
            "var_over_scale": (var / scale if scale else None),
        })
    rep = base_report(
        "exact",
        params={"p": params.p, "q": params.q, "r": params.r, "theta": params.theta},
        config={"n": n},
        results={"moments": rows},
    )
    if with_distribution:
        dist = distribution_dp(params, n, cap=resolved["dp_cap"])
        rep["results"]["distribution"] = [
            {"s": s, "z": z, "probability": w}
            for (s, z), w in sorted(dist.mass.items())
        ]
    if fmt == "json":
        _write_text(output, emit_json(rep))
    else:
        header = ["n", "mean_s", "var_s", "mean_z", "mean_sz",
                  "predicted_scale", "var_over_scale"]
        lines = _emit_csv_text(header, [[row[h] if row[h] is not None else ""
                                         for h in header] for row in rows])
        if with_distribution:
            lines += _emit_csv_text(["s", "z", "probability"],
                                    [[d["s"], d["z"], d["probability"]]
                                     for d in rep["results"]["distribution"]])
        _write_text(output, lines)
    return 0


def _experiment_plot(kind, rep):
    res = rep["results"]
    if kind == "lln":
        rows = res["snapshots"]
        ns = [row["n"] for row in rows]
        means = [row["mean_s"] / row["n"] for row in rows]
        pred = [res["predicted"]] * len(ns)
        return line_plot([(ns, means, "ensemble mean S_n/n"), (ns, pred, "limit")],
                         title="Law of large numbers", xlabel="n (log)",
                         ylabel="S_n / n", logx=True)
    if kind in ("clt", "critical") and "ecdf_x" in res:
        xs = res["ecdf_x"]
        return line_plot(
            [(xs, res["ecdf_f"], "standardized ECDF"),
             (xs, [normal_cdf(x) for x in xs], "normal CDF")],
            title="CDF overlay", xlabel="standardized S_n", ylabel="F(x)")
    if kind == "superdiffusive" and res.get("slope") is not None:
        ns = res["slope_ns"]
        return line_plot(
            [(ns, res["slope_vars"], "exact Var(S_n)"),
             (ns, [math.exp(res["slope_intercept"]) * n ** res["slope"] for n in ns],
              f"fit slope {res['slope']:.3f}")],
            title="Superdiffusive variance scaling", xlabel="n",
            ylabel="Var(S_n)", logx=True, logy=True)
    if kind == "regime-scan":
        rows = res["scan"]
        alphas = [row["alpha"] for row in rows]
        return line_plot(
            [(alphas, [row["slope"] for row in rows], "fitted exponent"),
             (alphas, [row["reference_slope"] for row in rows], "theory")],
            title="Variance-scaling exponent vs alpha", xlabel="alpha",
            ylabel="exponent")
    if kind == "lil-diagnostic":
        ns = res["snapshots"]
        med = res["median_running_max"]
        return line_plot([(ns, med, "median running max")],
                         title="Iterated-logarithm diagnostic",
                         xlabel="n (log)", ylabel="statistic", logx=True)
    return None


def cmd_experiment(args, resolved, output):
    params_needed = args.kind != "regime-scan"
    params = _params_from(resolved) if params_needed else None
    kind = args.kind
    seed = resolved["seed"]
    workers = resolved["workers"]
    if kind == "lln":
        snaps = _parse_snapshots(resolved["snapshots"])
        rep = experiments.lln_experiment(params, resolved["steps"],
                                         resolved["trajectories"], seed,
                                         workers=workers, snapshots=snaps)
    elif kind == "clt":
        rep = experiments.clt_experiment(params, resolved["steps"],
                                         resolved["trajectories"], seed,
                                         workers=workers, gate=resolved["gate"],
                                         dp_cap=resolved["dp_cap"])
    elif kind == "critical":
        rep = experiments.critical_experiment(params, resolved["steps"],
                                              resolved["trajectories"], seed,
                                              workers=workers,
                                              gate=resolved["gate"],
                                              dp_cap=resolved["dp_cap"])
    elif kind == "superdiffusive":
        rep = experiments.superdiffusive_experiment(
            params, resolved["steps"], resolved["trajectories"], seed,
            workers=workers, horizon_factor=resolved["horizon_factor"],
            gate=resolved["gate"])
    elif kind == "regime-scan":
        alphas = [float(tok) for tok in resolved["alphas"].split(",") if tok.strip()]
        rep = experiments.regime_scan_experiment(
            resolved["p"], resolved["q"], resolved["r"], alphas,
            n_max=resolved["n_max"])
    else:
        rep = experiments.lil_experiment(params, resolved["n_max"],
                                         resolved["trajectories"], seed,
                                         workers=workers)
    rep = base_report("experiment", **{k: v for k, v in rep.items() if k != "kind"},
                      kind=kind)
    _write_text(output, emit_json(rep))

    if args.csv:
        rows = rep["results"].get("snapshots") or rep["results"].get("scan")
        if rows:
            header = list(rows[0].keys())
            _write_text(args.csv, _emit_csv_text(
                header, [[row[h] for h in header] for row in rows]))
    if args.plot:
        svg = _experiment_plot(kind, rep)
        if svg:
            _write_text(args.plot, svg)

    if rep["pass"] is False:
        return 1
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        resolved = _resolve(args)
        output = args.output
        if args.command == "predict":
            return cmd_predict(resolved, output, resolved["format"] or "text")
        if args.command == "simulate":
            return cmd_simulate(resolved, output, resolved["format"] or "csv")
        if args.command == "exact":
            return cmd_exact(resolved, output, resolved["format"] or "csv",
                             args.distribution)
        return cmd_experiment(args, resolved, output)
    except LapsewalkError as exc:
        print(f"lapsewalk: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"lapsewalk: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
