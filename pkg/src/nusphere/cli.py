"""Command-line front end.

Subcommands
-----------
evolve     one trajectory: per-node geometry, mixture weights, survival
figure N   regenerate sweep dataset N in 1..5 (CSV/JSON + rendered PNG)
phases     phase decomposition + ordered-chain oracle with N-convergence
nmr        fluctuating-field program realizing the parameter set
selftest   condensed oracle cross-checks, PASS/FAIL per item

Configuration comes from flags, optionally seeded by a flat key=value
file (``--config``); explicit flags override file entries.  Exit codes:
0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import DecaySpec, NuSphereError, OscillationParams, make_params
from .evolve import bloch_trajectory, densify_until_smooth
from .generator import MODE_PAPER, MODES
from .nmr import NotRankOne, to_nmr
from .output import write_dataset
from .phases import chain_phase, pancharatnam, wrap_phase
from .sweeps import DEFAULT_FIGURE_MODE, Dataset, evolve_dataset, figure_dataset

DEFAULTS = {
    "energy_ev": 1.0e7,
    "dm2_ev2": 8.0e-5,
    "theta_rad": 0.188 * math.pi,
    "phi_rad": 0.0,
    "eta": 1.0,
    "c11": "0",
    "c22": "0",
    "c33": "0",
    "offdiag": "sqrt",
    "mode": None,            # per-command default
    "t_max_ev_inv": 2.0e12,
    "nodes": 2001,
    "format": "csv",
    "workers": 1,
    "closed_chain": False,
    "product_n": 4096,
    "plot": None,            # figure: on, others: off
    "out": None,
}

_FLOAT_KEYS = ("energy_ev", "dm2_ev2", "theta_rad", "phi_rad", "eta", "t_max_ev_inv")
_INT_KEYS = ("nodes", "workers", "product_n")
_BOOL_KEYS = ("closed_chain", "plot")


class ConfigError(Exception):
    pass


def parse_decay_coeff(text: str) -> tuple[float, str]:
    """Parse a decay coefficient: '0.095v0' (multiple of V0) or '3.8e-13' (eV)."""
    text = str(text).strip().lower()
    units = "ev"
    if text.endswith("v0"):
        units = "v0"
        text = text[:-2]
    try:
        return float(text), units
    except ValueError as exc:
        raise ConfigError(f"cannot parse decay coefficient {text!r}") from exc


def read_config_file(path: str) -> dict:
    """Flat key=value file mirroring the flags (dashes or underscores)."""
    values: dict = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _coerce(key: str, value):
    if value is None or not isinstance(value, str):
        return value
    if key in _FLOAT_KEYS:
        return float(value)
    if key in _INT_KEYS:
        return int(value)
    if key in _BOOL_KEYS:
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"cannot parse boolean {key}={value!r}")
    return value


def resolve_config(args: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        for key, value in read_config_file(args.config).items():
            cfg[key] = _coerce(key, value)
    for key in DEFAULTS:
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            cfg[key] = _coerce(key, cli_value)
    if cfg["mode"] is not None and cfg["mode"] not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {cfg['mode']!r}")
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg['format']!r}")
    if cfg["offdiag"] not in ("sqrt", "zero"):
        raise ConfigError(f"offdiag must be sqrt or zero, got {cfg['offdiag']!r}")
    for key in ("nodes", "workers", "product_n"):
        if cfg[key] < 1:
            raise ConfigError(f"{key} must be >= 1, got {cfg[key]}")
    return cfg


def build_params(cfg: dict) -> OscillationParams:
    coeffs = [parse_decay_coeff(cfg[k]) for k in ("c11", "c22", "c33")]
    units = {u for _, u in coeffs}
    if len(units) > 1:
        raise ConfigError("decay coefficients must share units (all 'v0' suffixed or all eV)")
    spec = DecaySpec(c11=coeffs[0][0], c22=coeffs[1][0], c33=coeffs[2][0],
                     units=units.pop(), offdiag=cfg["offdiag"])
    try:
        return make_params(cfg["energy_ev"], cfg["dm2_ev2"], cfg["theta_rad"],
                           cfg["phi_rad"], eta=cfg["eta"], decay_spec=spec)
    except NuSphereError as exc:
        raise ConfigError(str(exc)) from exc


def _resolved_meta(cfg: dict, command: str, keys: tuple[str, ...]) -> dict:
    meta = {"generator": f"nusphere {__version__}", "command": command}
    for key in keys:
        meta[key] = cfg[key]
    return meta


def _emit(dataset: Dataset, cfg: dict, default_stem: str, render: bool) -> Path:
    out = Path(cfg["out"]) if cfg["out"] else Path(f"{default_stem}.{cfg['format']}")
    path = write_dataset(dataset, out, fmt=cfg["format"])
    print(f"wrote {path}")
    if render:
        from .plotting import plot_dataset

        png = path.with_suffix(".png")
        plot_dataset(dataset, png)
        print(f"wrote {png}")
    return path


def cmd_evolve(args) -> int:
    cfg = resolve_config(args)
    params = build_params(cfg)
    mode = cfg["mode"] or MODE_PAPER
    meta = _resolved_meta(cfg, "evolve", ("energy_ev", "dm2_ev2", "theta_rad", "phi_rad",
                                          "eta", "c11", "c22", "c33", "offdiag",
                                          "t_max_ev_inv", "nodes", "format"))
    meta["mode"] = mode
    dataset = evolve_dataset(params, cfg["t_max_ev_inv"], cfg["nodes"], mode,
                             resolved_config=meta)
    _emit(dataset, cfg, "evolve", render=bool(cfg["plot"]))
    return 0


def cmd_figure(args) -> int:
    cfg = resolve_config(args)
    mode = cfg["mode"] or DEFAULT_FIGURE_MODE
    dataset = figure_dataset(args.number, mode=mode, nodes=cfg["nodes"], workers=cfg["workers"])
    dataset.meta["format"] = cfg["format"]
    render = cfg["plot"] if cfg["plot"] is not None else True
    _emit(dataset, cfg, f"figure{args.number}", render=render)
    return 0


def cmd_phases(args) -> int:
    cfg = resolve_config(args)
    params = build_params(cfg)
    mode = cfg["mode"] or MODE_PAPER
    traj, info = densify_until_smooth(params, cfg["t_max_ev_inv"], cfg["nodes"], mode=mode)
    report = pancharatnam(traj)
    ladder = sorted({max(2, cfg["product_n"] // k) for k in (8, 4, 2, 1)})
    products = [(n, *chain_phase(traj, n, closed=cfg["closed_chain"])) for n in ladder]
    columns = ["quantity", "value_rad", "value_wrapped_rad"]
    rows: list[list] = [
        ["gamma_t", report.gamma_t, float(wrap_phase(report.gamma_t))],
        ["gamma_d1", report.gamma_d1, float(wrap_phase(report.gamma_d1))],
        ["gamma_d2", report.gamma_d2, float(wrap_phase(report.gamma_d2))],
        ["gamma_d", report.gamma_d, float(wrap_phase(report.gamma_d))],
        ["gamma_p", report.gamma_p, float(wrap_phase(report.gamma_p))],
    ]
    for n, value, log10_tr in products:
        rows.append([f"gamma_p_product_n{n}", value, float(wrap_phase(value))])
    final = products[-1][1]
    rows.append(["gamma_p_product_minus_decomposition", final - report.gamma_p,
                 float(wrap_phase(final - report.gamma_p))])
    rows.append(["chain_trace_log10", products[-1][2], products[-1][2]])
    meta = _resolved_meta(cfg, "phases", ("energy_ev", "dm2_ev2", "theta_rad", "phi_rad",
                                          "eta", "c11", "c22", "c33", "offdiag",
                                          "t_max_ev_inv", "nodes", "product_n",
                                          "closed_chain", "format"))
    meta["mode"] = mode
    meta["solver"] = info["solver"]
    meta["trajectory_nodes"] = info["nodes"]
    dataset = Dataset(meta=meta, columns=columns, rows=rows)
    _emit(dataset, cfg, "phases", render=False)
    return 0


def cmd_nmr(args) -> int:
    cfg = resolve_config(args)
    params = build_params(cfg)
    columns = ["field", "value"]
    meta = _resolved_meta(cfg, "nmr", ("energy_ev", "dm2_ev2", "theta_rad", "phi_rad",
                                       "eta", "c11", "c22", "c33", "offdiag", "format"))
    try:
        prog = to_nmr(params)
        rows = [
            ["realizable_rank1", True],
            ["omega_ev", prog.omega],
            ["theta_rad", prog.theta],
            ["phi_rad", prog.phi],
            ["m0_ev", prog.m0],
            ["v0_ev", prog.v0],
            ["d1_ev", float(prog.d[0])],
            ["d2_ev", float(prog.d[1])],
            ["d3_ev", float(prog.d[2])],
            ["omega_in_reference_range", prog.omega_in_reference_range],
        ]
    except NotRankOne as exc:
        d_near = np.sqrt(np.maximum(np.diag(exc.nearest), 0.0))
        rows = [
            ["realizable_rank1", False],
            ["rank1_residual_ev", float(exc.residual)],
            ["nearest_d1_ev", float(d_near[0])],
            ["nearest_d2_ev", float(d_near[1])],
            ["nearest_d3_ev", float(d_near[2])],
        ]
    dataset = Dataset(meta=meta, columns=columns, rows=rows)
    _emit(dataset, cfg, "nmr", render=False)
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    ok = run_selftest(quick=True)
    return 0 if ok else 3


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value file; flags override it")
    parser.add_argument("--energy-ev", dest="energy_ev", type=float)
    parser.add_argument("--dm2-ev2", dest="dm2_ev2", type=float)
    parser.add_argument("--theta-rad", dest="theta_rad", type=float)
    parser.add_argument("--phi-rad", dest="phi_rad", type=float)
    parser.add_argument("--eta", type=float)
    parser.add_argument("--c11", help="decay c11: '<x>v0' (multiple of V0) or eV value")
    parser.add_argument("--c22")
    parser.add_argument("--c33")
    parser.add_argument("--offdiag", choices=("sqrt", "zero"))
    parser.add_argument("--mode", choices=MODES)
    parser.add_argument("--t-max-ev-inv", dest="t_max_ev_inv", type=float)
    parser.add_argument("--nodes", type=int)
    parser.add_argument("--out")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--workers", type=int)
    parser.add_argument("--closed-chain", dest="closed_chain", action="store_const", const=True)
    parser.add_argument("--product-n", dest="product_n", type=int)
    parser.add_argument("--plot", dest="plot", action="store_const", const=True)
    parser.add_argument("--no-plot", dest="plot", action="store_const", const=False)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nusphere",
                                     description="dissipative two-flavor neutrino evolution "
                                                 "on the Poincare sphere")
    parser.add_argument("--version", action="version", version=f"nusphere {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_evolve = sub.add_parser("evolve", help="single-trajectory dataset")
    _add_common(p_evolve)
    p_evolve.set_defaults(func=cmd_evolve)

    p_fig = sub.add_parser("figure", help="regenerate one sweep figure (1..5)")
    p_fig.add_argument("number", type=int, choices=range(1, 6))
    _add_common(p_fig)
    p_fig.set_defaults(func=cmd_figure)

    p_ph = sub.add_parser("phases", help="phase decomposition + chain oracle")
    _add_common(p_ph)
    p_ph.set_defaults(func=cmd_phases)

    p_nmr = sub.add_parser("nmr", help="fluctuating-field program record")
    _add_common(p_nmr)
    p_nmr.set_defaults(func=cmd_nmr)

    p_self = sub.add_parser("selftest", help="condensed oracle cross-checks")
    p_self.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NuSphereError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
