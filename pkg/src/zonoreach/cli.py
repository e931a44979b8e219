"""Benchmark harness: reach / sweep / calibrate / ablation / sensitivity /
export-training subcommands.

Exit codes: 0 success, 2 config error, 3 rank failure, 4 predictor
unavailable.
"""

import argparse
import json
import os
import statistics
import sys
import time

import numpy as np

from . import __version__, benchmark, conformal, ddmodel, reach, serialize, sysdata, training
from .setcalc import Zonotope, interval_hull, hausdorff_estimate
from .predictor_client import PredictorUnavailable, StreamPredictor

EXIT_CONFIG = 2
EXIT_RANK = 3
EXIT_PREDICTOR = 4


class ConfigError(Exception):
    pass


DEFAULTS = {
    "system": "benchmark5d",
    "delta_f": benchmark.DELTA_F,
    "delta_c": 3 * benchmark.DELTA_F,
    "T": benchmark.T_DATA,
    "K": 2,
    "Ns": 3,
    "rho": 4,
    "sigma_w": benchmark.SIGMA_W,
    "x0_center": [1.0] * 5,
    "x0_radius": 0.1,
    "u_center": [10.0],
    "u_radius": 0.25,
    "delta": 0.05,
    "seed": benchmark.DEFAULT_SEED,
    "workers": 1,
    "coarse_noise_mode": "estimated",
    "predictor_cmd": None,
    "calibration_file": None,
    "n_calibrate": 200,
    "n_traj": 20,
}


def load_config(path=None, overrides=None):
    cfg = dict(DEFAULTS)
    if path:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path) as fh:
            user = json.load(fh)
        unknown = set(user) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        cfg.update(user)
    cfg.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if cfg["system"] != "benchmark5d":
        raise ConfigError("only the built-in 'benchmark5d' system is supported")
    if abs(cfg["delta_c"] - cfg["Ns"] * cfg["delta_f"]) > 1e-12 * cfg["delta_c"]:
        raise ConfigError("config requires delta_c = Ns * delta_f")
    for field in ("K", "Ns", "rho", "T", "workers"):
        if int(cfg[field]) != cfg[field] or cfg[field] < 1:
            raise ConfigError(f"{field} must be a positive integer")
    if cfg["calibration_file"] and not os.path.exists(cfg["calibration_file"]):
        raise ConfigError(f"missing file: {cfg['calibration_file']}")
    return cfg


def build_setup(cfg, Ns=None, seed=None):
    try:
        return benchmark.build(Ns=Ns or cfg["Ns"], T=cfg["T"],
                               seed=cfg["seed"] if seed is None else seed,
                               delta_f=cfg["delta_f"])
    except RuntimeError as exc:
        if "rank" in str(exc):
            raise
        raise ConfigError(str(exc)) from exc


def estimated_coarse_noise(setup):
    ab = ddmodel.extract_A_block(setup.fine_model)
    return ddmodel.estimate_coarse_noise(ab, setup.fine.Z_w, setup.Ns)


def chain_config(cfg, setup, workers=None):
    return reach.ChainConfig(cfg["K"], setup.Ns, cfg["rho"], setup.U,
                             coarse_noise_mode=cfg["coarse_noise_mode"],
                             workers=workers or cfg["workers"])


def anchor_noise(cfg, setup):
    if cfg["coarse_noise_mode"] == "exact-oracle":
        return sysdata.exact_coarse_noise(setup.fine.A, setup.fine.Z_w,
                                          setup.Ns)
    return estimated_coarse_noise(setup)


def mean_width(sets, skip_first=True):
    sets = sets[1:] if skip_first else sets
    return float(np.mean([interval_hull(Z).width.mean() for Z in sets]))


def timed(fn, reps=5):
    """Median wall-clock over ``reps`` after one discarded warmup run."""
    fn()
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        samples.append(time.perf_counter() - t0)
    return out, statistics.median(samples)


def write_manifest(out_dir, cfg, extra=None):
    manifest = {"version": __version__, "config": cfg}
    manifest.update(extra or {})
    serialize.dump(manifest, os.path.join(out_dir, "manifest.json"))


def _write_chain(out_dir, name, chain):
    serialize.dump(serialize.chain_to_doc(chain),
                   os.path.join(out_dir, f"{name}.json"))
    with open(os.path.join(out_dir, f"{name}.csv"), "w") as fh:
        fh.write(serialize.chain_to_csv(chain))


def _load_predictor(cfg, setup):
    if not cfg["predictor_cmd"]:
        raise PredictorUnavailable("no predictor endpoint configured")
    if not cfg["calibration_file"]:
        raise ConfigError("ta-ira requires a calibration record file")
    record = serialize.calibration_from_doc(
        serialize.load(cfg["calibration_file"]))
    predictor = StreamPredictor(cfg["predictor_cmd"],
                                kappa=cfg["rho"] * setup.csys.n,
                                n=setup.csys.n)
    return predictor, record


def cmd_reach(cfg, method, out_dir):
    setup = build_setup(cfg)
    ccfg = chain_config(cfg, setup)
    from .setcalc import mult_counter
    mult_counter.reset()
    extra = {"seed": setup.seed, "method": method}
    if method == "dd":
        chain, elapsed = timed(lambda: reach.run_fine_chain(
            ccfg, setup.fine_model, setup.X0, setup.fine.Z_w))
        _write_chain(out_dir, "dd_chain", chain)
        extra["mult_count"] = chain.mult_count
    elif method in ("ira", "ta-ira"):
        Zw_c = anchor_noise(cfg, setup)
        predictor = q_hat = None
        if method == "ta-ira":
            predictor, record = _load_predictor(cfg, setup)
            q_hat = record.q_hat
            extra["q_hat"] = q_hat
        result, elapsed = timed(lambda: reach.run_ira(
            ccfg, setup.coarse_model, setup.fine_model, setup.X0, Zw_c,
            setup.fine.Z_w, predictor=predictor, q_hat=q_hat))
        if predictor is not None:
            predictor.close()
        sets, times = result.all_sets()
        flat = reach.ReachChain(sets, "interpolated", times, result.mult_count)
        _write_chain(out_dir, f"{method}_chain", flat)
        _write_chain(out_dir, "anchors", result.anchors)
        extra["mult_count"] = result.mult_count
    elif method == "mb":
        steps = cfg["K"] * setup.Ns
        chain, elapsed = timed(lambda: reach.run_model_based(
            setup.fine.A, setup.fine.B, setup.X0, setup.U, setup.fine.Z_w,
            setup.fine.delta, steps))
        coarse_dist = reach.coarse_effective_disturbance(
            setup.fine.A, setup.fine.B, setup.U, setup.fine.Z_w, setup.Ns)
        coarse_chain = reach.run_model_based(
            np.linalg.matrix_power(setup.fine.A, setup.Ns),
            np.zeros((setup.csys.n, 1)), setup.X0,
            Zonotope(np.zeros(1)), coarse_dist, setup.coarse.delta, cfg["K"])
        _write_chain(out_dir, "mb_fine", chain)
        _write_chain(out_dir, "mb_coarse", coarse_chain)
        gap = max(hausdorff_estimate(coarse_chain.sets[k],
                                     chain.sets[k * setup.Ns])
                  for k in range(cfg["K"] + 1))
        extra["step_size_invariance_gap"] = gap
        extra["mult_count"] = 0
    else:
        raise ConfigError(f"unknown method {method!r}")
    extra["wall_seconds"] = elapsed
    extra["mult_counter"] = mult_counter.count
    write_manifest(out_dir, cfg, extra)
    return 0


def _sweep_cell(cfg, K, Ns):
    setup = build_setup(cfg, Ns=Ns)
    cell_cfg = dict(cfg, K=K, Ns=Ns, delta_c=Ns * cfg["delta_f"])
    ccfg = chain_config(cell_cfg, setup)
    Zw_c = anchor_noise(cell_cfg, setup)
    fine_chain, t_dd = timed(lambda: reach.run_fine_chain(
        ccfg, setup.fine_model, setup.X0, setup.fine.Z_w))
    ira, t_ira = timed(lambda: reach.run_ira(
        ccfg, setup.coarse_model, setup.fine_model, setup.X0, Zw_c,
        setup.fine.Z_w))
    mb = reach.run_model_based(setup.fine.A, setup.fine.B, setup.X0, setup.U,
                               setup.fine.Z_w, setup.fine.delta, K * Ns)
    sets_ira, _ = ira.all_sets()
    w_ira = mean_width(sets_ira)
    w_dd = mean_width(fine_chain.sets)
    w_mb = mean_width(mb.sets)
    hausdorff = max(hausdorff_estimate(a, b)
                    for a, b in zip(sets_ira, fine_chain.sets))
    return {
        "K": K, "Ns": Ns,
        "time_dd_ms": 1e3 * t_dd, "time_ira_ms": 1e3 * t_ira,
        "speedup": t_dd / t_ira,
        "ira_over_dd": w_ira / w_dd,
        "dd_over_mb": w_dd / w_mb,
        "ira_over_mb": w_ira / w_mb,
        "hausdorff": hausdorff,
        "mult_dd": fine_chain.mult_count,
        "mult_ira": ira.mult_count,
    }


def cmd_sweep(cfg, K_values, Ns_values, out_dir):
    rows = [_sweep_cell(cfg, K, Ns) for Ns in Ns_values for K in K_values]
    cols = list(rows[0].keys())
    with open(os.path.join(out_dir, "sweep.csv"), "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(repr(row[c]) for c in cols) + "\n")
    write_manifest(out_dir, cfg, {"rows": rows})
    return 0


def _baseline_instances(cfg, setup, count, seed):
    return training.generate_instances(
        setup.fine, setup.fine_model, setup.X0, setup.U, setup.fine.Z_w,
        setup.Ns, count, cfg["n_traj"], seed, rho=cfg["rho"])


def cmd_calibrate(cfg, out_dir, mode="pointwise"):
    setup = build_setup(cfg)
    if cfg["predictor_cmd"]:
        predictor = StreamPredictor(cfg["predictor_cmd"],
                                    kappa=cfg["rho"] * setup.csys.n,
                                    n=setup.csys.n)
    else:
        predictor = conformal.BaselinePredictor(rho=cfg["rho"])
    instances = _baseline_instances(cfg, setup, cfg["n_calibrate"],
                                    seed=cfg["seed"] + 1)
    record = conformal.calibrate(predictor, instances, cfg["delta"], mode,
                                 n_traj=cfg["n_traj"])
    fresh = _baseline_instances(cfg, setup, max(100, cfg["n_calibrate"] // 2),
                                seed=cfg["seed"] + 2)
    report = conformal.evaluate_coverage(predictor, record, fresh)
    if isinstance(predictor, StreamPredictor):
        predictor.close()
    serialize.dump(serialize.calibration_to_doc(record),
                   os.path.join(out_dir, "calibration.json"))
    with open(os.path.join(out_dir, "coverage.csv"), "w") as fh:
        fh.write("substep,coverage,ci_low,ci_high\n")
        for row in report["pointwise"]:
            fh.write(f"{row['substep']},{row['coverage']!r},"
                     f"{row['ci_low']!r},{row['ci_high']!r}\n")
    write_manifest(out_dir, cfg, {
        "q_hat": record.q_hat, "mode": mode, "n_cal": record.n_cal,
        "coverage": report["pointwise_overall"],
        "path_coverage": report["path_coverage"],
    })
    return 0


def cmd_ablation(cfg, out_dir):
    setup = build_setup(cfg)
    Zw_c = anchor_noise(cfg, setup)
    ccfg_seq = chain_config(cfg, setup, workers=1)
    ccfg_par = chain_config(cfg, setup, workers=max(2, cfg["workers"]))
    fine_chain, t_dd = timed(lambda: reach.run_fine_chain(
        ccfg_seq, setup.fine_model, setup.X0, setup.fine.Z_w))
    w_dd = mean_width(fine_chain.sets)

    def ira_row(name, ccfg, predictor=None, q_hat=None, guarantee="det."):
        result, t = timed(lambda: reach.run_ira(
            ccfg, setup.coarse_model, setup.fine_model, setup.X0, Zw_c,
            setup.fine.Z_w, predictor=predictor, q_hat=q_hat))
        sets, _ = result.all_sets()
        return result, {
            "variant": name, "runtime_ms": 1e3 * t, "speedup": t_dd / t,
            "width_ratio": mean_width(sets) / w_dd,
            "guarantee": guarantee,
        }
    seq_result, row_seq = ira_row("IRA-seq", ccfg_seq)
    par_result, row_par = ira_row("IRA-par", ccfg_par)
    rows = [row_seq, row_par]
    bitwise_equal = all(
        np.array_equal(a.center, b.center)
        and np.array_equal(a.generators, b.generators)
        for a, b in zip(seq_result.all_sets()[0], par_result.all_sets()[0]))
    if cfg["predictor_cmd"]:
        predictor, record = _load_predictor(cfg, setup)
        rows.append(ira_row("TA-IRA-no-qhat", ccfg_par, predictor, 0.0,
                            guarantee="none")[1])
        rows.append(ira_row("TA-IRA-conformal", ccfg_par, predictor,
                            record.q_hat, guarantee="stat.")[1])
        predictor.close()
    rows.append({"variant": "fine-DD", "runtime_ms": 1e3 * t_dd,
                 "speedup": 1.0, "width_ratio": 1.0, "guarantee": "det."})
    with open(os.path.join(out_dir, "ablation.csv"), "w") as fh:
        fh.write("variant,runtime_ms,speedup,width_ratio,guarantee\n")
        for row in rows:
            fh.write(f"{row['variant']},{row['runtime_ms']!r},"
                     f"{row['speedup']!r},{row['width_ratio']!r},"
                     f"{row['guarantee']}\n")
    write_manifest(out_dir, cfg, {"rows": rows,
                                  "seq_par_bitwise_equal": bitwise_equal})
    return 0


def cmd_sensitivity(cfg, out_dir):
    setup = build_setup(cfg)
    Zw_c = anchor_noise(cfg, setup)
    report = reach.step_size_sensitivity_report(
        setup.coarse_model, setup.fine_model, setup.X0, setup.U, Zw_c,
        setup.fine.Z_w, setup.Ns, rho=cfg["rho"])
    doc = {
        "widths_coarse": list(report.widths_coarse),
        "widths_fine": list(report.widths_fine),
        "hausdorff": report.hausdorff,
        "rel_gap": report.rel_gap,
        "flagged": report.flagged,
    }
    serialize.dump(doc, os.path.join(out_dir, "sensitivity.json"))
    write_manifest(out_dir, cfg, {"sensitivity": doc})
    return 0


def cmd_export_training(cfg, n_chains, out_dir):
    setup = build_setup(cfg)
    records = training.generate_training_records(
        setup.fine, setup.fine_model, setup.X0, setup.U, setup.fine.Z_w,
        cfg["K"], setup.Ns, n_chains, cfg["n_traj"], seed=cfg["seed"] + 10,
        rho=cfg["rho"])
    n_holdout = max(1, int(round(0.15 * len(records))))
    split = {"train": records[n_holdout:], "holdout": records[:n_holdout]}
    for name, recs in split.items():
        with open(os.path.join(out_dir, f"{name}.jsonl"), "w") as fh:
            for rec in recs:
                fh.write(json.dumps(rec) + "\n")
    write_manifest(out_dir, cfg, {
        "chains": n_chains,
        "pairs_per_chain": cfg["K"] * (setup.Ns - 1),
        "holdout_chains": n_holdout,
        "kappa": cfg["rho"] * setup.csys.n,
    })
    return 0


def _parse_range(text):
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",")]


def main(argv=None):
    parser = argparse.ArgumentParser(prog="zonoreach")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config")
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--out", default="out")
    sub = parser.add_subparsers(dest="command", required=True)
    p_reach = sub.add_parser("reach", parents=[common])
    p_reach.add_argument("--method", required=True,
                         choices=["dd", "ira", "ta-ira", "mb"])
    p_sweep = sub.add_parser("sweep", parents=[common])
    p_sweep.add_argument("--K-range", default="2:5")
    p_sweep.add_argument("--Ns-range", default="3")
    p_cal = sub.add_parser("calibrate", parents=[common])
    p_cal.add_argument("--mode", default="pointwise",
                       choices=["pointwise", "pathwise"])
    sub.add_parser("ablation", parents=[common])
    sub.add_parser("sensitivity", parents=[common])
    p_exp = sub.add_parser("export-training", parents=[common])
    p_exp.add_argument("--chains", type=int, default=100)
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config,
                          {"seed": args.seed, "workers": args.workers})
    except (ConfigError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    os.makedirs(args.out, exist_ok=True)
    try:
        if args.command == "reach":
            return cmd_reach(cfg, args.method, args.out)
        if args.command == "sweep":
            return cmd_sweep(cfg, _parse_range(args.K_range),
                             _parse_range(args.Ns_range), args.out)
        if args.command == "calibrate":
            return cmd_calibrate(cfg, args.out, args.mode)
        if args.command == "ablation":
            return cmd_ablation(cfg, args.out)
        if args.command == "sensitivity":
            return cmd_sensitivity(cfg, args.out)
        if args.command == "export-training":
            return cmd_export_training(cfg, args.chains, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PredictorUnavailable as exc:
        print(f"predictor unavailable: {exc}", file=sys.stderr)
        return EXIT_PREDICTOR
    except RuntimeError as exc:
        if "rank" in str(exc):
            print(f"rank check failed: {exc}", file=sys.stderr)
            return EXIT_RANK
        raise
    raise AssertionError("unhandled command")


if __name__ == "__main__":
    sys.exit(main())
