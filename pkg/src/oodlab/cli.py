"""Command line tool: run a named scenario and write a report directory.

Each scenario writes ``report.json`` (deterministic, byte-identical across
runs with the same configuration) plus CSV tables, and for some scenarios an
SVG figure.  Exit codes: 0 success, 1 runtime failure, 2 unknown scenario or
bad usage, 3 invalid parameters.
"""

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from oodlab import scenarios as sc
from oodlab.distributions import DiagonalGaussian, FiniteDiscrete
from oodlab.rng import make_rng, split_rng
from oodlab.statistics import LogLikelihoodStatistic
from oodlab.training import TrainConfig, evaluate_grid, grid_mle_fit, grid_nt_fit

__all__ = ["main"]

_GLOBAL_DEFAULTS = {"seed": 7, "sample_count": 100000}


class _ConfigError(Exception):
    """A parameter or configuration problem the user can fix."""


@dataclass(frozen=True)
class ResolvedConfig:
    scenario: str
    seed: int
    sample_count: int
    parameters: dict
    out_dir: Path
    no_plots: bool


# ---------------------------------------------------------------------------
# Small output helpers
# ---------------------------------------------------------------------------


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_json(path, payload):
    text = json.dumps(payload, sort_keys=True, indent=2, default=_json_default)
    path.write_text(text + "\n")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x):
    """Format a float with 6 significant digits for CSV cells."""
    return format(float(x), ".6g")


def _fmt_trunc4(x):
    """Truncate toward zero at 4 decimals, then print with 4 decimals."""
    return f"{math.trunc(float(x) * 10000.0) / 10000.0:.4f}"


def _warn(msg):
    print(f"oodlab: warning: {msg}", file=sys.stderr)


def _plots_or_warn(cfg, draw):
    """Run the plotting closure unless disabled; degrade to a warning."""
    if cfg.no_plots:
        return
    try:
        draw()
    except Exception as exc:  # plotting must never fail the run
        _warn(f"figure generation failed ({exc}); continuing with CSV output only")


def _gaussian_from_params(spec, name):
    try:
        return DiagonalGaussian(mean=spec["mean"], variance=spec["variance"])
    except (TypeError, KeyError) as exc:
        raise _ConfigError(f"{name} must be a dict with 'mean' and 'variance': {exc}")


# ---------------------------------------------------------------------------
# Scenario runners
# ---------------------------------------------------------------------------


def _run_fig1(cfg):
    rep = sc.score_preservation_report(cfg.sample_count, cfg.seed)
    results = rep.to_dict()
    results["ks_fold_below_critical"] = rep.ks_fold < rep.ks_critical_0p01
    results["ks_collapse_below_critical"] = rep.ks_collapse < rep.ks_critical_0p01

    _write_csv(
        cfg.out_dir / "scores.csv",
        ["log_lik_base", "log_lik_fold", "log_lik_collapse"],
        (
            (_fmt(a), _fmt(b), _fmt(c))
            for a, b, c in zip(rep.scores_base, rep.scores_fold, rep.scores_collapse)
        ),
    )

    def draw():
        from oodlab.plots import score_histograms_svg

        score_histograms_svg(
            cfg.out_dir / "score_histograms.svg",
            {
                "base": rep.scores_base,
                "quadrant fold": rep.scores_fold,
                "radial collapse": rep.scores_collapse,
            },
            xlabel="log-likelihood (nats)",
        )

    _plots_or_warn(cfg, draw)
    return results, []


def _run_table1(cfg):
    supp_p = cfg.parameters["supp_p"]
    cases = cfg.parameters["supp_q_cases"]
    if not isinstance(cases, (list, tuple)) or not cases:
        raise _ConfigError("supp_q_cases must be a nonempty list of support sizes")

    reports = []
    for supp_q in cases:
        eps = supp_q / supp_p
        spec = sc.EpsilonTransferSpec(supp_p=supp_p, supp_q=supp_q, epsilon=eps)
        reports.append(sc.epsilon_transfer(spec))

    oracle_ll = -math.log(supp_p)
    results = {
        "oracle_log_lik": oracle_ll,
        "cases": [r.to_dict() for r in reports],
        "min_epsilon": {str(int(sq)): sc.min_epsilon(supp_p, sq) for sq in cases},
    }
    notes = [
        "log-likelihood cells are in nats; CSV cells are truncated (not rounded) at 4 decimals",
        "cells are log-likelihoods and therefore negative; a negative-log-likelihood reading flips the sign",
    ]

    rows = [("oracle", "", "", _fmt_trunc4(oracle_ll))]
    rows += [
        (
            f"transfer_q{int(r.spec.supp_q)}",
            str(int(r.spec.supp_q)),
            _fmt(r.spec.epsilon),
            _fmt_trunc4(r.model_log_lik_in),
        )
        for r in reports
    ]
    _write_csv(
        cfg.out_dir / "table1.csv",
        ["model", "supp_q", "epsilon", "log_lik_per_in_sample"],
        rows,
    )

    def draw():
        from oodlab.plots import bar_chart_svg

        labels = ["oracle"] + [f"q={int(r.spec.supp_q)}" for r in reports]
        values = [oracle_ll] + [r.model_log_lik_in for r in reports]
        bar_chart_svg(
            cfg.out_dir / "table1.svg", labels, values, "in-distribution log-likelihood (nats)"
        )

    _plots_or_warn(cfg, draw)
    return results, notes


def _run_level_set(cfg):
    params = cfg.parameters
    base = FiniteDiscrete(params["probs"])
    reports = sc.level_set_report(
        base, params["target_level_value"], params["subset_a"], params["lambdas"]
    )
    results = {
        "base_probs": list(map(float, base.probs)),
        "target_level_value": float(params["target_level_value"]),
        "subset_a": [int(i) for i in params["subset_a"]],
        "cases": [r.to_dict() for r in reports],
        "max_abs_power_minus_size": max(r.max_abs_power_minus_size for r in reports),
        "max_group_mass_diff": max(r.max_group_mass_diff for r in reports),
    }
    _write_csv(
        cfg.out_dir / "level_set.csv",
        ["lam", "tv_distance", "max_group_mass_diff", "max_abs_power_minus_size"],
        [
            (_fmt(r.lam), _fmt(r.tv_distance), _fmt(r.max_group_mass_diff), _fmt(r.max_abs_power_minus_size))
            for r in reports
        ],
    )
    return results, []


def _run_wrong_model(cfg):
    params = cfg.parameters
    p = _gaussian_from_params(params["p"], "p")
    q = _gaussian_from_params(params["q"], "q")
    points = int(params["quadrature_points"])

    rng = make_rng(cfg.seed)
    rep = sc.wrong_model_report(p, q, cfg.sample_count, rng)
    quad_true = sc.auc_by_quadrature(p, q, LogLikelihoodStatistic(p), points=points)
    quad_lr = sc.auc_by_quadrature(p, q, LogLikelihoodStatistic(rep.lr_model), points=points)

    results = rep.to_dict()
    results["seed"] = cfg.seed
    results["auc_true_quadrature"] = quad_true
    results["auc_lr_model_quadrature"] = quad_lr

    for label, roc in (("roc_true", rep.roc_true), ("roc_lr_model", rep.roc_lr_model)):
        _write_csv(
            cfg.out_dir / f"{label}.csv",
            ["size", "power"],
            ((_fmt(s), _fmt(w)) for s, w in zip(roc.sizes, roc.powers)),
        )

    def draw():
        from oodlab.plots import roc_curves_svg

        roc_curves_svg(
            cfg.out_dir / "roc.svg",
            {"true model": rep.roc_true, "ratio model": rep.roc_lr_model},
        )

    _plots_or_warn(cfg, draw)
    return results, []


def _run_overlap_bound(cfg):
    params = cfg.parameters
    p = _gaussian_from_params(params["p"], "p")
    q = _gaussian_from_params(params["q"], "q")
    rep = sc.overlap_bound_report(
        p, q, cfg.sample_count, cfg.seed,
        train_n=int(params["train_n"]), slack=float(params["slack"]),
    )
    results = rep.to_dict()
    _write_csv(
        cfg.out_dir / "overlap_bound.csv",
        ["statistic", "best_accuracy", "auc"],
        [
            (name, _fmt(rep.statistic_accuracy[name]), _fmt(rep.statistic_auc[name]))
            for name in sorted(rep.statistic_accuracy)
        ],
    )
    return results, []


def _run_bernoulli_typical(cfg):
    params = cfg.parameters
    dim = int(params["dim"])
    prob = float(params["success_prob"])
    eps_small = float(params["epsilon_small"])
    eps_large = float(params["epsilon_large"])
    n_mc = int(params["mc_samples"])

    spec_small = sc.TypicalSetSpec(dim=dim, success_prob=prob, epsilon=eps_small)
    spec_large = sc.TypicalSetSpec(dim=dim, success_prob=prob, epsilon=eps_large)
    spec_zero = sc.TypicalSetSpec(dim=dim, success_prob=prob, epsilon=0.0)
    all_ones = np.ones(dim)

    rng = make_rng(cfg.seed)
    mass_mc = sc.typical_mass_mc(spec_small, n_mc, rng)
    swap = sc.swap_set_comparison(spec_small)

    results = {
        "spec_small": spec_small.to_dict(),
        "spec_large": spec_large.to_dict(),
        "all_ones_in_small": sc.typical_membership(all_ones, spec_small),
        "all_ones_in_large": sc.typical_membership(all_ones, spec_large),
        "mass_small_exact": sc.typical_mass(spec_small),
        "mass_large_exact": sc.typical_mass(spec_large),
        "mass_zero_epsilon": sc.typical_mass(spec_zero),
        "mass_small_mc": mass_mc,
        "mc_samples": n_mc,
        "seed": cfg.seed,
        "swap": swap.to_dict(),
    }
    _write_csv(
        cfg.out_dir / "typical_mass.csv",
        ["epsilon", "exact_mass", "mc_mass"],
        [
            (_fmt(0.0), _fmt(results["mass_zero_epsilon"]), ""),
            (_fmt(eps_small), _fmt(results["mass_small_exact"]), _fmt(mass_mc)),
            (_fmt(eps_large), _fmt(results["mass_large_exact"]), ""),
        ],
    )
    return results, []


def _run_nt_train(cfg):
    params = cfg.parameters
    n_bins = int(params["n_bins"])
    in_bins = int(params["in_bins"])
    ood_bins = int(params["ood_bins"])
    if in_bins < 1 or ood_bins < 1 or in_bins + ood_bins > n_bins:
        raise _ConfigError(
            f"need in_bins >= 1, ood_bins >= 1, in_bins + ood_bins <= n_bins; "
            f"got {in_bins}, {ood_bins}, {n_bins}"
        )
    seeds = params["seeds"]
    if not isinstance(seeds, (list, tuple)) or not seeds:
        raise _ConfigError("seeds must be a nonempty list of integers")

    # In-distribution: harmonic weights on the first in_bins bins.
    # Out-of-distribution: uniform on the last ood_bins bins.
    probs_in = np.zeros(n_bins)
    probs_in[:in_bins] = 1.0 / np.arange(1, in_bins + 1)
    probs_in /= probs_in.sum()
    probs_ood = np.zeros(n_bins)
    probs_ood[-ood_bins:] = 1.0 / ood_bins
    dist_in = FiniteDiscrete(probs_in)
    dist_ood = FiniteDiscrete(probs_ood)

    train_cfg_base = {
        "learning_rate": float(params["learning_rate"]),
        "steps": int(params["steps"]),
        "clamp_c": float(params["clamp_log_prob"]),
    }
    ood_support = np.flatnonzero(probs_ood > 0)

    per_seed = []
    for seed in seeds:
        streams = split_rng(make_rng(int(seed)), 4)
        counts_in = np.bincount(dist_in.sample(streams[0], int(params["n_train"])), minlength=n_bins)
        counts_ood = np.bincount(dist_ood.sample(streams[1], int(params["n_ood"])), minlength=n_bins)
        test_in = np.bincount(dist_in.sample(streams[2], int(params["n_test"])), minlength=n_bins)
        test_ood = np.bincount(dist_ood.sample(streams[3], int(params["n_test_ood"])), minlength=n_bins)

        train_cfg = TrainConfig(seed=int(seed), **train_cfg_base)
        fit_mle = grid_mle_fit(counts_in, train_cfg)
        fit_nt = grid_nt_fit(counts_in, counts_ood, train_cfg)
        eval_mle = evaluate_grid(fit_mle.model, test_in, test_ood)
        eval_nt = evaluate_grid(fit_nt.model, test_in, test_ood)
        ood_logp = fit_nt.model.log_probabilities()[ood_support]

        per_seed.append(
            {
                "seed": int(seed),
                "auc_nt": eval_nt.auc,
                "auc_mle": eval_mle.auc,
                "mean_ll_in_nt": eval_nt.mean_log_lik_in,
                "mean_ll_in_mle": eval_mle.mean_log_lik_in,
                "ll_gap": abs(eval_nt.mean_log_lik_in - eval_mle.mean_log_lik_in),
                "ood_log_prob_min": float(ood_logp.min()),
                "ood_log_prob_max": float(ood_logp.max()),
            }
        )

    results = {
        "per_seed": per_seed,
        "all_nt_auc_one": all(row["auc_nt"] == 1.0 for row in per_seed),
        "max_ll_gap": max(row["ll_gap"] for row in per_seed),
        "clamp_log_prob": train_cfg_base["clamp_c"],
    }
    _write_csv(
        cfg.out_dir / "nt_train.csv",
        ["seed", "auc_nt", "auc_mle", "mean_ll_in_nt", "mean_ll_in_mle", "ll_gap"],
        [
            (
                row["seed"],
                _fmt(row["auc_nt"]),
                _fmt(row["auc_mle"]),
                _fmt(row["mean_ll_in_nt"]),
                _fmt(row["mean_ll_in_mle"]),
                _fmt(row["ll_gap"]),
            )
            for row in per_seed
        ],
    )
    return results, []


SCENARIOS = {
    "fig1": (
        _run_fig1,
        {},
        "score-preservation check for folded and collapsed alternatives",
    ),
    "table1": (
        _run_table1,
        {"supp_p": 1000000, "supp_q_cases": [10000, 1000, 100]},
        "log-likelihood cost of moving mass onto off-support outcomes",
    ),
    "level-set": (
        _run_level_set,
        {
            "probs": [0.1, 0.1, 0.1, 0.2, 0.25, 0.25],
            "target_level_value": 0.1,
            "subset_a": [0],
            "lambdas": [0.25, 0.5, 0.9],
        },
        "power-equals-size audit of discrete level-set reweighting",
    ),
    "wrong-model": (
        _run_wrong_model,
        {
            "p": {"mean": [0.0], "variance": [1.0]},
            "q": {"mean": [2.0], "variance": [4.0]},
            "quadrature_points": 4096,
        },
        "a wrong density that outscores the true model at detection",
    ),
    "overlap-bound": (
        _run_overlap_bound,
        {
            "p": {"mean": [0.0], "variance": [1.0]},
            "q": {"mean": [2.0], "variance": [1.0]},
            "train_n": 2048,
            "slack": 0.01,
        },
        "no statistic beats the support-overlap error floor",
    ),
    "bernoulli-typical": (
        _run_bernoulli_typical,
        {
            "dim": 100,
            "success_prob": 0.75,
            "epsilon_small": 0.1,
            "epsilon_large": 0.3,
            "mc_samples": 1000000,
        },
        "typical-set membership and mass for a product Bernoulli",
    ),
    "nt-train": (
        _run_nt_train,
        {
            "n_bins": 64,
            "in_bins": 48,
            "ood_bins": 8,
            "n_train": 4000,
            "n_ood": 1000,
            "n_test": 4000,
            "n_test_ood": 1000,
            "learning_rate": 0.5,
            "steps": 1500,
            "clamp_log_prob": math.log(1e-9),
            "seeds": [0, 1, 2, 3, 4],
        },
        "clamped push-down training versus plain maximum likelihood",
    ),
}


# ---------------------------------------------------------------------------
# Configuration resolution and entry point
# ---------------------------------------------------------------------------


def _build_parser():
    epilog_lines = ["scenarios:"]
    epilog_lines += [f"  {name:<18} {desc}" for name, (_, _, desc) in SCENARIOS.items()]
    parser = argparse.ArgumentParser(
        prog="oodlab",
        description="Run a reproducible scenario and write a report directory.",
        epilog="\n".join(epilog_lines),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("scenario_pos", nargs="?", metavar="scenario", help="scenario name")
    parser.add_argument("--scenario", dest="scenario_flag", help="scenario name (alternative to the positional)")
    parser.add_argument("--config", type=Path, help="JSON file with scenario, seed, sample_count, parameters")
    parser.add_argument("--seed", type=int, help="random seed (default 7)")
    parser.add_argument("--n", type=int, dest="sample_count", help="samples per side (default 100000)")
    parser.add_argument("--out", type=Path, default=Path("oodlab_report"), help="output directory")
    parser.add_argument("--no-plots", action="store_true", help="skip SVG figures")
    return parser


def _load_config_file(path):
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise _ConfigError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise _ConfigError(f"config file is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise _ConfigError("config file must hold a JSON object")
    allowed = {"scenario", "seed", "sample_count", "parameters"}
    unknown = set(raw) - allowed
    if unknown:
        raise _ConfigError(
            f"unknown config keys {sorted(unknown)}; allowed: {sorted(allowed)}"
        )
    return raw


def _require_int(value, name, minimum):
    if isinstance(value, bool) or not isinstance(value, int):
        raise _ConfigError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise _ConfigError(f"{name} must be at least {minimum}, got {value}")
    return value


def _resolve_config(name, args, file_cfg):
    defaults = SCENARIOS[name][1]
    parameters = dict(defaults)
    file_params = file_cfg.get("parameters", {})
    if not isinstance(file_params, dict):
        raise _ConfigError("parameters must be a JSON object")
    unknown = set(file_params) - set(defaults)
    if unknown:
        raise _ConfigError(
            f"unknown parameters for scenario {name!r}: {sorted(unknown)}; "
            f"allowed: {sorted(defaults)}"
        )
    parameters.update(file_params)

    seed = args.seed if args.seed is not None else file_cfg.get("seed", _GLOBAL_DEFAULTS["seed"])
    count = (
        args.sample_count
        if args.sample_count is not None
        else file_cfg.get("sample_count", _GLOBAL_DEFAULTS["sample_count"])
    )
    seed = _require_int(seed, "seed", 0)
    count = _require_int(count, "sample_count", 1)
    return ResolvedConfig(
        scenario=name,
        seed=seed,
        sample_count=count,
        parameters=parameters,
        out_dir=args.out,
        no_plots=args.no_plots,
    )


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        file_cfg = _load_config_file(args.config) if args.config else {}
    except _ConfigError as exc:
        print(f"oodlab: error: {exc}", file=sys.stderr)
        return 3

    name = args.scenario_flag or args.scenario_pos or file_cfg.get("scenario")
    if args.scenario_flag and args.scenario_pos and args.scenario_flag != args.scenario_pos:
        print(
            f"oodlab: error: scenario given twice with different values "
            f"({args.scenario_pos!r} and {args.scenario_flag!r})",
            file=sys.stderr,
        )
        return 2
    if name is None:
        print("oodlab: error: no scenario given (positional, --scenario, or config file)", file=sys.stderr)
        return 2
    if name not in SCENARIOS:
        print(
            f"oodlab: error: unknown scenario {name!r}; available: {', '.join(SCENARIOS)}",
            file=sys.stderr,
        )
        return 2

    try:
        cfg = _resolve_config(name, args, file_cfg)
    except _ConfigError as exc:
        print(f"oodlab: error: {exc}", file=sys.stderr)
        return 3

    runner = SCENARIOS[name][0]
    try:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        results, notes = runner(cfg)
    except (_ConfigError, ValueError) as exc:
        print(f"oodlab: error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:
        print(f"oodlab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    payload = {
        "schema_version": 1,
        "scenario": cfg.scenario,
        "config": {
            "seed": cfg.seed,
            "sample_count": cfg.sample_count,
            "parameters": cfg.parameters,
        },
        "results": results,
        "notes": notes,
    }
    try:
        _write_json(cfg.out_dir / "report.json", payload)
    except Exception as exc:
        print(f"oodlab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
