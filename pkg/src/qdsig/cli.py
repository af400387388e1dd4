"""Command-line front end.

Four subcommands: ``entropy`` (accessible-information sweep), ``analyze``
(cost-matrix security analysis), ``simulate`` (Monte Carlo protocol runs)
and ``cost-matrix`` (model-predicted click probabilities).  Every command is
a pure function of (config, seed): payload outputs are byte-identical across
reruns.  Exit codes: 0 success, 1 config error, 2 numerical certification
failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import csv
import math
import sys
from pathlib import Path

import numpy as np

from .bounds import build_security_report, sweep_bounds, thresholds
from .channel import (
    ChannelModel,
    CostMatrix,
    bundled_cost_matrix,
    multiport_null_click_probability,
    predicted_cost_matrix,
    signal_null_click_probability,
)
from .config import PRESETS, ConfigError, RunConfig, apply_preset
from .measurement import passive_forgery_analysis
from .simulate import ProtocolConfig, run_experiment, run_trial, trial_rng, run_distribution
from .states import PhaseAlphabet, signature_element_density, von_neumann_entropy


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def _resolve_cost_matrix(config: RunConfig, path_override: str | None) -> CostMatrix:
    path = path_override or config.cost_matrix_path
    if path is not None:
        return CostMatrix.from_csv(path)
    if config.alphabet.n_phases == 8 and abs(config.alphabet.mean_photons - 0.16) < 1e-12:
        return bundled_cost_matrix()
    return predicted_cost_matrix(config.alphabet, config.channel)


def cmd_entropy(config: RunConfig, outdir: Path, figures: bool) -> int:
    grid = np.linspace(config.entropy_grid_start, config.entropy_grid_stop, config.entropy_grid_points)
    rows = []
    for n in config.entropy_n_values:
        for mu in grid:
            s = von_neumann_entropy(signature_element_density(PhaseAlphabet(n, math.sqrt(mu))))
            rows.append(
                {
                    "n_phases": n,
                    "mean_photons": float(mu),
                    "entropy_bits": s,
                    "accessible_bits": config.receivers * s,
                    "key_bits": math.log2(n),
                }
            )
    header = ["n_phases", "mean_photons", "entropy_bits", "accessible_bits", "key_bits"]
    _write_csv(outdir / "entropy_curve.csv", header, [[r[h] for h in header] for r in rows])
    print(f"wrote {outdir / 'entropy_curve.csv'} ({len(rows)} rows)")
    if figures:
        from .figures import save_entropy_figure

        save_entropy_figure(rows, outdir / "entropy_curve.png")
        print(f"wrote {outdir / 'entropy_curve.png'}")
    return 0


def cmd_analyze(config: RunConfig, outdir: Path, figures: bool) -> int:
    cost = _resolve_cost_matrix(config, None)
    report = build_security_report(
        cost,
        config.alphabet,
        config.channel,
        receivers=config.receivers,
        rejection_threshold=config.rejection_threshold,
        hoeffding_slack=config.hoeffding_slack,
        repudiation_base=config.repudiation_base,
        reference_length=config.reference_length,
        helstrom_tol=config.helstrom_tol,
    )
    _write_json(outdir / "security_report.json", report.to_dict())
    header, row = report.to_csv_row()
    _write_csv(outdir / "security_report.csv", header, [row])

    lengths = np.logspace(
        math.log10(config.sweep_start), math.log10(config.sweep_stop), config.sweep_points
    )
    sweep = sweep_bounds(
        report.gap,
        lengths,
        repudiation_base=config.repudiation_base,
        gap_amplified=report.gap_amplified,
        delta=report.delta,
    )
    sweep_header = ["L", "eps_forging", "eps_repudiation", "eps_robustness", "eps_active"]
    _write_csv(outdir / "bounds_sweep.csv", sweep_header, [[r[h] for h in sweep_header] for r in sweep])
    print(f"wrote {outdir / 'security_report.json'}")
    print(f"wrote {outdir / 'security_report.csv'}")
    print(f"wrote {outdir / 'bounds_sweep.csv'} ({len(sweep)} rows)")
    print(
        f"p_forgery in [{report.passive.p_forgery_lower:.4e}, {report.passive.p_forgery_upper:.4e}], "
        f"gap {report.gap:.4e}, certified {report.certified}"
    )
    if figures:
        from .figures import save_bounds_figure, save_cost_matrix_figure

        save_bounds_figure(sweep, outdir / "bounds_vs_length.png")
        save_cost_matrix_figure(cost.values, outdir / "cost_matrix.png", title="measured cost matrix")
        print(f"wrote {outdir / 'bounds_vs_length.png'}")
        print(f"wrote {outdir / 'cost_matrix.png'}")
    if not report.certified:
        print("optimality certification failed: bounds are heuristic", file=sys.stderr)
        return 2
    return 0


def _simulation_protocol_config(config: RunConfig) -> tuple[ProtocolConfig, CostMatrix]:
    cost = _resolve_cost_matrix(config, config.sim_cost_matrix_path)
    if config.sim_s_a is None or config.sim_s_v is None:
        analysis = passive_forgery_analysis(cost, config.alphabet)
        s_a, s_v = thresholds(analysis.p_original, analysis.gap_lower)
        if config.sim_s_a is not None:
            s_a = float(config.sim_s_a)
        if config.sim_s_v is not None:
            s_v = float(config.sim_s_v)
    else:
        s_a, s_v = float(config.sim_s_a), float(config.sim_s_v)
    if config.sim_rejection_threshold is not None:
        r = float(config.sim_rejection_threshold)
    else:
        honest_null = multiport_null_click_probability(config.channel, config.alphabet.mean_photons)
        r = 2.0 * honest_null + config.channel.dark_probability_per_clock
    protocol = ProtocolConfig(
        alphabet=config.alphabet,
        signature_length=config.signature_length,
        channel=config.channel,
        cost=cost,
        s_a=s_a,
        s_v=s_v,
        rejection_threshold=r,
        alice_strategy=config.alice,
        bob_strategy=config.bob,
        trials=config.trials,
        master_seed=config.master_seed,
        bob_extra_loss_db=config.bob_extra_loss_db,
    )
    return protocol, cost


def cmd_simulate(config: RunConfig, outdir: Path, figures: bool) -> int:
    try:
        protocol, _ = _simulation_protocol_config(config)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    label = f"alice={protocol.alice_strategy.name}, bob={protocol.bob_strategy.name}"
    summary = run_experiment(protocol, label=label)
    summary.write_trials_csv(outdir / "trials.csv")
    _write_json(outdir / "summary.json", summary.to_dict())
    print(f"wrote {outdir / 'trials.csv'} ({len(summary.trials)} trials)")
    print(f"wrote {outdir / 'summary.json'}")
    if config.write_transcript:
        rng = trial_rng(protocol.master_seed, 0)
        transcript = run_distribution(protocol, rng)
        transcript.to_csv(outdir / "transcript_trial0.csv")
        print(f"wrote {outdir / 'transcript_trial0.csv'}")
    if figures:
        from .figures import save_simulation_figure

        save_simulation_figure(summary.to_dict(), outdir / "simulation_summary.png")
        print(f"wrote {outdir / 'simulation_summary.png'}")
    return 0


def cmd_cost_matrix(config: RunConfig, outdir: Path, figures: bool, ideal: bool, estimate: bool) -> int:
    if ideal:
        model = ChannelModel(
            dark_cps=0.0,
            det_efficiency=1.0,
            visibility=1.0,
            multiport_loss_db=0.0,
            receiver_loss_db=0.0,
        )
    else:
        model = config.channel
    predicted = predicted_cost_matrix(config.alphabet, model)
    predicted.to_csv(outdir / "cost_matrix.csv")
    print(f"wrote {outdir / 'cost_matrix.csv'}")
    estimated = None
    if estimate:
        rng = trial_rng(config.master_seed, 0)
        n = config.alphabet.n_phases
        per_cell = max(1, config.estimate_pulses // (n * n))
        values = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                p = signal_null_click_probability(
                    2 * math.pi * i / n, 2 * math.pi * j / n, config.alphabet.mean_photons, model
                )
                values[i, j] = (rng.random(per_cell) < p).mean()
        estimated = CostMatrix(values)
        estimated.to_csv(outdir / "cost_matrix_estimated.csv")
        print(f"wrote {outdir / 'cost_matrix_estimated.csv'} ({per_cell} pulses/entry)")
    if figures:
        from .figures import save_cost_matrix_figure

        title = "ideal cost matrix" if ideal else "predicted cost matrix"
        save_cost_matrix_figure(predicted.values, outdir / "cost_matrix.png", title=title)
        print(f"wrote {outdir / 'cost_matrix.png'}")
        if estimated is not None:
            save_cost_matrix_figure(
                estimated.values, outdir / "cost_matrix_estimated.png", title="estimated cost matrix"
            )
            print(f"wrote {outdir / 'cost_matrix_estimated.png'}")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--seed", type=int, help="master seed override")
    parser.add_argument("--out", type=Path, default=Path("qdsig_output"), help="output directory")
    parser.add_argument("--preset", choices=sorted(PRESETS), help="named simulation scenario")
    parser.add_argument("--no-figures", action="store_true", help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdsig",
        description="Coherent-state quantum digital signatures: analysis and simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("entropy", "sweep the accessible information per signature element"),
        ("analyze", "security analysis of a measured cost matrix"),
        ("simulate", "Monte Carlo protocol runs"),
        ("cost-matrix", "model-predicted cost matrix"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "cost-matrix":
            p.add_argument("--ideal", action="store_true", help="perfect-device limit")
            p.add_argument("--estimate", action="store_true", help="add a Monte Carlo estimate")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig.from_file(args.config) if args.config else RunConfig.default()
        if args.seed is not None:
            doc = config.to_dict()
            doc["master_seed"] = args.seed
            config = RunConfig.parse(doc)
        if args.preset:
            config = apply_preset(config, args.preset)
        outdir = args.out
        outdir.mkdir(parents=True, exist_ok=True)
        figures = not args.no_figures
        if args.command == "entropy":
            return cmd_entropy(config, outdir, figures)
        if args.command == "analyze":
            return cmd_analyze(config, outdir, figures)
        if args.command == "simulate":
            return cmd_simulate(config, outdir, figures)
        return cmd_cost_matrix(config, outdir, figures, args.ideal, args.estimate)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
