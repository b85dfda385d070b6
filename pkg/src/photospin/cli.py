"""``photospin`` command-line entry point.

Each subcommand reads an optional ``key = value`` config file, runs one
computation and writes a table as CSV or JSON. Exit status: 0 on success, 1 for
configuration problems, 2 when the numerics fail.
"""

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import entanglement as ent
from . import fock, spin, tomography, valence
from .config import ConfigError, Settings, parse_bool, parse_entries, parse_floats, parse_grid

DEFAULT_SEED = 271828
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


def _positive_int(value):
    n = int(value)
    if n < 1:
        raise ValueError("must be a positive integer")
    return n


def _convention(value):
    if value not in ("symmetric", "real"):
        raise ValueError("expected 'symmetric' or 'real'")
    return value


def _source(value):
    if value not in ("two-singlets", "singlet-product"):
        raise ValueError("expected 'two-singlets' or 'singlet-product'")
    return value


def _unit_interval(parser):
    def parse(value):
        out = parser(value)
        if np.any(np.asarray(out) < 0) or np.any(np.asarray(out) > 1):
            raise ValueError("values must lie in [0, 1]")
        return out

    return parse


def _theta_grid(value):
    grid = parse_grid(value)
    if grid[0] < 0 or grid[-1] > np.pi / 4 + 1e-12:
        raise ValueError("theta must lie in [0, pi/4]")
    return np.minimum(grid, np.pi / 4)


def _nonneg_grid(value):
    grid = parse_grid(value)
    if grid[0] < 0:
        raise ValueError("couplings must be non-negative")
    return grid


SCHEMAS = {
    "hom-visibility": {
        "eta.grid": (_unit_interval(parse_grid), "0 1 0.01"),
        "vsys": (_unit_interval(float), "0.853"),
    },
    "hom-dip": {
        "hom.etas": (_unit_interval(parse_floats), "0.17 0.5 0.67"),
        "delay.grid": (parse_grid, "-600 600 10"),
        "hom.sigma": (float, "150"),
        "vsys": (_unit_interval(float), "0.853"),
        "baseline": (float, "1"),
    },
    "concurrence-scan": {
        "theta.grid": (_theta_grid, "0 0.785398163397 0.005"),
        "source": (_source, "two-singlets"),
        "tdc.convention": (_convention, "symmetric"),
        "tdc.swap_ports": (parse_bool, "false"),
    },
    "phase-diagram": {
        "j2.grid": (_nonneg_grid, "0 2 0.1"),
        "j3.grid": (_nonneg_grid, "0 2 0.1"),
        "j1": (float, "1"),
        "half_norm": (parse_bool, "false"),
    },
    "checkerboard-spectrum": {
        "ratio.grid": (_nonneg_grid, "0 2 0.01"),
        "levels": (_positive_int, "6"),
        "sz": (float, "0"),
        "lattice.file": (str, None),
    },
    "checkerboard-coefficients": {
        "ratio.grid": (_nonneg_grid, "0 3 0.05"),
        "lattice.file": (str, None),
    },
    "tomography-demo": {
        "tomo.events": (_positive_int, "100000"),
        "tomo.resamples": (_positive_int, "100"),
    },
}


# ----------------------------------------------------------------- output


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".12g")


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, str):
        return x
    x = float(x)
    return None if not math.isfinite(x) else float(format(x, ".12g"))


def render(command, seed, columns, rows, fmt):
    if fmt == "json":
        doc = {
            "command": command,
            "seed": seed,
            "columns": list(columns),
            "rows": [[_json_value(v) for v in row] for row in rows],
        }
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


# ------------------------------------------------------------ subcommands


def run_hom_visibility(cfg, seed):
    eta = cfg["eta.grid"]
    v = np.atleast_1d(fock.ideal_hom_visibility(eta))
    theta = np.arctan(np.sqrt(eta))
    rows = [(e, t, vi, cfg["vsys"] * vi) for e, t, vi in zip(eta, theta, v)]
    return ("eta", "theta", "v_ideal", "v_model"), rows


def run_hom_dip(cfg, seed):
    model = fock.HomDipModel(cfg["hom.sigma"], cfg["vsys"], cfg["baseline"])
    rows = []
    for eta in cfg["hom.etas"]:
        for delay, rate in fock.hom_dip_curve(eta, cfg["delay.grid"], model):
            rows.append((eta, delay, rate))
    return ("eta", "delay", "rate"), rows


def run_concurrence_scan(cfg, seed):
    sources = (
        fock.SourceConfig.two_singlets()
        if cfg["source"] == "two-singlets"
        else fock.SourceConfig.singlet_and_product()
    )
    rows = []
    for theta in cfg["theta.grid"]:
        eta = fock.reflectivity_from_theta(theta)
        setting = fock.TdcSetting(eta, cfg["tdc.convention"], cfg["tdc.swap_ports"])
        _, psi = fock.simulate_postselected_state(sources, setting)
        rho = ent.as_density_matrix(psi)
        c = [ent.concurrence(ent.partial_trace(rho, (1, j))) for j in (2, 3, 4)]
        mono = ent.monogamy_check(psi, focus=1)
        rows.append((theta, eta, *c, mono.sum_sq, mono.tau, mono.satisfied))
    return ("theta", "eta", "c12", "c13", "c14", "sum_sq", "tau", "monogamy_ok"), rows


def run_phase_diagram(cfg, seed):
    columns = ["j2_over_j1", "j3_over_j1", "re_alpha", "re_beta", "abs_alpha", "abs_beta", "abs_sum", "degenerate_flag"]
    if cfg["half_norm"]:
        columns += ["half_norm_re_alpha", "half_norm_re_beta"]
    j1 = cfg["j1"]
    if not j1 > 0:
        raise ConfigError("j1 must be positive")
    rows = []
    for p in valence.four_site_phase_diagram(cfg["j2.grid"] * j1, cfg["j3.grid"] * j1, j1):
        a, b = p.alpha, p.beta
        row = [p.j2 / j1, p.j3 / j1, np.real(a), np.real(b), abs(a), abs(b), abs(a) + abs(b), p.degenerate]
        if cfg["half_norm"]:
            pa, pb = (np.nan, np.nan) if p.degenerate else valence.half_norm_rescale(a, b)
            row += [np.real(pa), np.real(pb)]
        rows.append(row)
    return columns, rows


def _load_lattice(cfg, base):
    path = cfg["lattice.file"]
    if path is None:
        return spin.CHECKERBOARD6, ("J2", "J1")
    p = Path(path)
    if not p.is_absolute():
        p = base / p
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"lattice.file: cannot read {p}: {exc.strerror}") from exc
    try:
        lattice, ratio = spin.lattice_from_config(parse_entries(text, str(p)))
    except ValueError as exc:
        raise ConfigError(f"{p}: {exc}") from exc
    names = ("J2", "J1") if ratio is None else tuple(ratio[0].split("/"))
    if len(names) != 2:
        raise ConfigError(f"{p}: ratio key must look like 'ratio J2/J1'")
    try:
        lattice.at_ratio(1.0, *names)
    except (ValueError, KeyError, OverflowError) as exc:
        raise ConfigError(f"{p}: {exc}") from exc
    return lattice, names


def run_checkerboard_spectrum(cfg, seed, base):
    lattice, (num, den) = _load_lattice(cfg, base)
    k = cfg["levels"]
    if k > spin.sector_dimension(lattice.n_sites, cfg["sz"]):
        raise ConfigError(f"levels={k} exceeds the S_z = {cfg['sz']} sector dimension")
    rows = []
    for r in cfg["ratio.grid"]:
        w = spin.sz_sector_spectrum(lattice.at_ratio(r, num, den), cfg["sz"], k).eigenvalues
        rows.append((r, *w))
    return ("ratio", *(f"e{i}" for i in range(k))), rows


def run_checkerboard_coefficients(cfg, seed, base):
    lattice, (num, den) = _load_lattice(cfg, base)
    if (num, den) != ("J2", "J1"):
        raise ConfigError("checkerboard-coefficients expects couplings named J1 and J2")
    if lattice.boundary is None:
        raise ConfigError("lattice.file must give a 'boundary' order")
    try:
        basis = valence.checkerboard_basis(lattice)
    except ValueError as exc:
        raise ConfigError(f"lattice.file: {exc}") from exc
    rows = []
    for row in valence.checkerboard_coefficients(cfg["ratio.grid"], lattice, basis):
        c = np.real_if_close(row.coefficients)
        if np.iscomplexobj(c):
            raise ArithmeticError(f"complex coefficients at ratio {row.ratio}")
        rows.append((row.ratio, *c, row.residual))
    return ("j2_over_j1", "c1", "c2", "c3", "c4", "residual"), rows


def run_tomography_demo(cfg, seed):
    events, resamples = cfg["tomo.events"], cfg["tomo.resamples"]
    if resamples < 2:
        raise ConfigError("tomo.resamples must be at least 2")
    psi = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    rho = np.outer(psi, psi.conj())
    settings = tomography.build_settings(2)
    counts = tomography.simulate_counts(rho, settings, events, seed)
    est = tomography.reconstruct(counts)
    # resampling draws from its own entropy stream, distinct from the data
    mean, std = tomography.monte_carlo_uncertainty(counts, resamples, ent.concurrence, (seed, 1))
    rows = [
        ("seed", seed),
        ("events_per_setting", events),
        ("resamples", resamples),
        ("fidelity", ent.fidelity_pure(est, psi)),
        ("trace_distance", ent.trace_distance(est, rho)),
        ("concurrence_true", ent.concurrence(rho)),
        ("concurrence_reconstructed", ent.concurrence(est)),
        ("concurrence_mc_mean", mean),
        ("concurrence_mc_std", std),
    ]
    return ("metric", "value"), rows


RUNNERS = {
    "hom-visibility": run_hom_visibility,
    "hom-dip": run_hom_dip,
    "concurrence-scan": run_concurrence_scan,
    "phase-diagram": run_phase_diagram,
    "checkerboard-spectrum": run_checkerboard_spectrum,
    "checkerboard-coefficients": run_checkerboard_coefficients,
    "tomography-demo": run_tomography_demo,
}
NEEDS_BASE = {"checkerboard-spectrum", "checkerboard-coefficients"}


def _seed(value):
    n = int(value, 0)
    if not 0 <= n < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return n


def build_parser():
    parser = argparse.ArgumentParser(prog="photospin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")
    for name in RUNNERS:
        p = sub.add_parser(name, help=f"keys: {', '.join(SCHEMAS[name])}")
        p.add_argument("--config", type=Path, help="key = value file")
        p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help=f"default {DEFAULT_SEED}")
        p.add_argument("--out", type=Path, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those are configuration errors here
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG

    base = Path(".")
    entries = []
    try:
        if args.config is not None:
            try:
                text = args.config.read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from exc
            entries = parse_entries(text, str(args.config))
            base = args.config.parent
        cfg = Settings(entries, SCHEMAS[args.command], str(args.config or "<defaults>"))
        runner = RUNNERS[args.command]
        with np.errstate(divide="raise", over="raise", invalid="raise"):
            if args.command in NEEDS_BASE:
                columns, rows = runner(cfg, args.seed, base)
            else:
                columns, rows = runner(cfg, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError, fock.PostselectionError, ValueError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    text = render(args.command, args.seed, columns, rows, args.format)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    return EXIT_OK


def main():
    sys.exit(run())
