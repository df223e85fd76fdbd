"""
Command-line front end.

    modalshunt run <scenario.toml> [--seed N] [--out DIR] [--quiet]
    modalshunt list-modes <scenario.toml> [--count N] [--out DIR]
    modalshunt check <network-bundle> <model-bundle>

Exit codes: 0 success, 1 failed passivity verdict (``check``), 2 scenario
or argument error, 3 model error, 4 synthesis error, 5 numerical failure.
"""

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .beam import build_analog_network
from .bundle import export_model, export_network, import_model, import_network
from .frf import attenuation, band_peak, coupled_frf, frequency_grid, write_frf_csv
from .modal import auto_mac, open_short_eemcf, solve_modes
from .model import ModelError, NumericalError, SingularModeShapeError, SynthesisError
from .scenario import ScenarioError, load_scenario
from .synthesis import check_passivity, synthesize

EXIT_OK = 0
EXIT_NOT_PASSIVE = 1
EXIT_PARSE = 2
EXIT_MODEL = 3
EXIT_SYNTHESIS = 4
EXIT_NUMERICAL = 5


class _Log:
    def __init__(self, quiet):
        self.quiet = quiet

    def __call__(self, msg=""):
        if not self.quiet:
            print(msg)


def _fmt(x):
    return repr(float(x))


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _synthesize(model, mech, cfg, log):
    try:
        return synthesize(model, mech, cfg)
    except SingularModeShapeError as exc:
        if cfg.internal_shape_policy != "identity-pad":
            raise
        print(f"note: {exc}; retrying", file=sys.stderr)
        return synthesize(model, mech, replace(cfg, internal_shape_policy="random-orthogonal"))


def _default_bands(mech, n=4):
    return tuple(int(i) for i in mech.flexible_indices[:n])


def run_scenario(scn, log):
    """Execute a parsed scenario; returns the output directory."""
    out = Path(scn.outputs)
    out.mkdir(parents=True, exist_ok=True)
    model = scn.build_model()
    mech = solve_modes(model.stiffness_sc, model.mass)
    kc, _ = open_short_eemcf(model, mech)
    export_model(model, out / "model")
    log(f"scenario {scn.name}: model {model.name}, N={model.n_dof}, P={model.n_transducers}")

    networks = {}
    targets = None
    if scn.synthesis is not None:
        cfg = scn.synthesis.resolve(mech, scn.seed)
        targets = cfg.targeted_modes
        syn = _synthesize(model, mech, cfg, log)
        networks["modal"] = syn.network
        export_network(syn.network, out / "network")
        report = check_passivity(syn.network, model.capacitance_piezo, syn.electrical_modes)
        (out / "passivity.txt").write_text(
            f"network={syn.network.name}\n" + report.to_text(), encoding="utf-8")
        log(f"synthesized network: Ne={syn.network.n_total}, alpha={syn.shapes.alpha:.6g}, "
            f"passivity {'pass' if report.passive else 'FAIL'}")
        scale = syn.shapes.effective_scaling
        _write_csv(
            out / "eemcf.csv",
            ["mode", "freq_hz", "eemcf_open_short", "eemcf_modal", "scaling",
             "f_e_hz", "zeta_e"],
            [[r, _fmt(mech.freq_hz[r]), _fmt(kc[r]), _fmt(syn.eemcf[k]), _fmt(scale[k]),
              _fmt(np.sqrt(syn.tuning.omega_e_sq[k]) / (2 * np.pi)),
              _fmt(syn.tuning.zeta_e[k])]
             for k, r in enumerate(targets)],
        )
        mac = auto_mac(syn.shapes.dimensionless)
        _write_csv(out / "auto_mac.csv", ["mode"] + [str(r) for r in targets],
                   [[r] + [_fmt(v) for v in row] for r, row in zip(targets, mac)])

    if scn.comparison == "analog-cells":
        if model.n_transducers != scn.beam.n_cells:
            raise ModelError("analog-cells comparison needs one port per beam cell (no grouping)")
        analog = build_analog_network(scn.analog, scn.beam.n_cells)
        networks["analog"] = analog
        export_network(analog, out / "analog_network")
        report = check_passivity(analog, model.capacitance_piezo)
        (out / "passivity_analog.txt").write_text(
            f"network={analog.name}\n" + report.to_text(), encoding="utf-8")
        log(f"analog network: Ne={analog.n_total}, "
            f"passivity {'pass' if report.passive else 'FAIL'}")

    band_modes = scn.band_modes or targets or _default_bands(mech)
    rows = []
    for sweep in scn.sweeps:
        fr = mech.freq_hz[list(band_modes)]
        grid = frequency_grid(sweep, fr, mech.freq_hz[~mech.rigid])
        base = coupled_frf(model, None, sweep, grid, mech)
        write_frf_csv(base, out / f"frf_{sweep.name}_short-circuit.csv")
        h = scn.band_halfwidth
        bands = [(f * (1 - h), f * (1 + h)) for f in fr]
        for label, net in networks.items():
            frf = coupled_frf(model, net, sweep, grid, mech)
            if frf.freq_hz.size != base.freq_hz.size:
                raise NumericalError(f"{label} FRF singular at {frf.metadata['skipped_hz']} Hz")
            write_frf_csv(frf, out / f"frf_{sweep.name}_{label}.csv")
            att = attenuation(base, frf, bands)
            for r, band, a in zip(band_modes, bands, att):
                rows.append([sweep.name, label, r, _fmt(mech.freq_hz[r]), _fmt(band[0]),
                             _fmt(band[1]), _fmt(band_peak(base, band)),
                             _fmt(band_peak(frf, band)), _fmt(a)])
                log(f"  {sweep.name} {label:>7s} mode {r:3d} "
                    f"({mech.freq_hz[r]:9.3f} Hz): {a:7.2f} dB")
    if rows:
        _write_csv(out / "attenuation.csv",
                   ["sweep", "network", "mode", "freq_hz", "band_lo_hz", "band_hi_hz",
                    "peak_short_circuit", "peak_damped", "attenuation_db"], rows)
    log(f"artifacts written to {out}")
    return out


def mode_table(model):
    mech = solve_modes(model.stiffness_sc, model.mass)
    kc, _ = open_short_eemcf(model, mech)
    return [(i, float(mech.freq_hz[i]), bool(mech.rigid[i]), float(kc[i]))
            for i in range(mech.n_modes)]


def _cmd_run(args, log):
    scn = load_scenario(args.scenario)
    if args.seed is not None:
        scn = replace(scn, seed=args.seed)
    if args.out is not None:
        scn = replace(scn, outputs=Path(args.out))
    run_scenario(scn, log)
    return EXIT_OK


def _cmd_list_modes(args, log):
    scn = load_scenario(args.scenario)
    rows = mode_table(scn.build_model())
    if args.count is not None:
        rows = rows[: args.count]
    log(f"{'index':>5s} {'freq_hz':>14s} {'rigid':>5s} {'eemcf':>10s}")
    for i, f, rigid, k in rows:
        log(f"{i:5d} {f:14.6f} {str(rigid).lower():>5s} {k:10.6f}")
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "modes.csv", ["index", "freq_hz", "rigid", "eemcf"],
                   [[i, _fmt(f), str(rigid).lower(), _fmt(k)] for i, f, rigid, k in rows])
    return EXIT_OK


def _cmd_check(args, log):
    net = import_network(args.network)
    model = import_model(args.model)
    if net.n_ports != model.n_transducers:
        raise ModelError(f"network has {net.n_ports} ports, model has "
                         f"{model.n_transducers} transducers")
    report = check_passivity(net, model.capacitance_piezo)
    log(f"network={net.name}")
    log(report.to_text().rstrip("\n"))
    return EXIT_OK if report.passive else EXIT_NOT_PASSIVE


def build_parser():
    parser = argparse.ArgumentParser(
        prog="modalshunt", description="Modal-based synthesis of piezoelectric shunt networks.")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario and write its artifacts")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int, help="override the scenario's random seed")
    p.add_argument("--out", help="override the output directory")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("list-modes", help="print short-circuit modes and their EEMCF")
    p.add_argument("scenario")
    p.add_argument("--count", type=int, help="print only the first COUNT modes")
    p.add_argument("--out", help="also write modes.csv into this directory")
    p.set_defaults(func=_cmd_list_modes)

    p = sub.add_parser("check", help="passivity check of a network bundle against a model")
    p.add_argument("network")
    p.add_argument("model")
    p.set_defaults(func=_cmd_check)

    for p in sub.choices.values():
        p.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                       help="suppress progress output")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "run" and args.seed is not None and args.seed < 0:
        print("error: --seed must be nonnegative", file=sys.stderr)
        return EXIT_PARSE
    log = _Log(args.quiet)
    try:
        return args.func(args, log)
    except ScenarioError as exc:
        code, msg = EXIT_PARSE, f"scenario error: {exc}"
    except FileNotFoundError as exc:
        code = EXIT_PARSE if args.command != "check" else EXIT_MODEL
        msg = f"file not found: {exc.filename}"
    except ModelError as exc:
        code, msg = EXIT_MODEL, f"model error: {exc}"
    except SynthesisError as exc:
        code, msg = EXIT_SYNTHESIS, f"synthesis error: {exc}"
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        code, msg = EXIT_NUMERICAL, f"numerical failure: {exc}"
    print(msg, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
